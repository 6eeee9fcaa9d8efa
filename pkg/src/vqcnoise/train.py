"""Forward evaluation, MSE loss, gradient-free optimization, accuracy.

Ideal execution (all mask flags off, readout off) computes exact statevector
expectations; any active circuit noise switches to density-matrix execution
with per-stage channels and shot-sampled Z-basis parity estimates.

Performance shape: the evaluator simulates whole sample batches at once.
Gates whose matrices are shared across the batch (everything except the
per-sample encoding phases) are contracted over the stacked states in a
single tensordot; per-gate noise is folded with the gate into one local
superoperator, so a noisy gate costs one contraction instead of one per
Kraus operator.  Encoding phases are diagonal and apply as broadcast
multiplies.  The post-feature-map state of every sample is cached per batch,
so each optimizer evaluation re-runs only the ansatz tail.

Determinism contract: every stochastic ingredient (angle perturbations, shot
sampling, optimizer initialization) draws from a generator seeded by an
explicit integer, so identical configs and seeds give bit-identical traces.
Shot generators are re-seeded identically at every optimizer evaluation,
making the noisy loss a deterministic function of the weights (common random
numbers); angle noise is drawn once when a sample batch is encoded, not per
evaluation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import seeding
from .ansatz import bind, build_ansatz, compose_classifier
from .channels import NoiseProfile, mask_to_channel_sets
from .data import LabeledSet
from .encoding import build_zz_feature_map, inject_angle_noise, to_angles
from .qcore import (DENSITY, STATEVECTOR, Gate, Observable, QuantumState,
                    _diagonal_signs, expectation, gate_matrix,
                    parity_observable)

OPTIMIZERS = ("nelder-mead", "spsa")


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer, sampling, and circuit-shape knobs for one training run.

    ``shots = 0`` (the default) evaluates noisy-mode expectations exactly
    from the density matrix (the infinite-shot limit); ``shots >= 1``
    estimates them from that many Z-basis samples, re-seeded identically per
    evaluation.
    """

    max_iters: int = 200          # function-evaluation budget
    shots: int = 0                # 0 = exact noisy expectation
    observable: Observable | None = None  # default: full Z...Z parity
    optimizer: str = "nelder-mead"
    seed: int = 7
    simplex_step: float = 0.5     # initial simplex edge (radians)
    diameter_tol: float = 1e-4    # simplex-collapse stopping tolerance
    spsa_a: float = 0.4
    spsa_c: float = 0.2
    fm_reps: int = 2
    ansatz_reps: int = 2

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 0 (0 = exact)")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass(frozen=True)
class TrainTrace:
    """Best-vertex loss after every function evaluation, plus the result."""

    losses: tuple[float, ...]
    weights: np.ndarray
    iterations: int
    wall_seconds: float


@dataclass
class EncodedBatch:
    """Encoding angles and cached post-feature-map states for a sample set."""

    angles: np.ndarray            # (B, d) bound encoding angles
    states: np.ndarray            # (B, 2^d) or (B, 2^d, 2^d) after the prefix
    shot_seeds: tuple             # per-sample integer seeds for sampling


def _superoperator_matrix(channels) -> np.ndarray | None:
    """Row-major-vec superoperator of a channel list applied in order."""
    total = None
    for ch in channels:
        d = ch.dim
        s = np.zeros((d * d, d * d), dtype=complex)
        for op in ch.operators:
            s += np.kron(op, op.conj())
        total = s if total is None else s @ total
    return total


class Executor:
    """Caches the classifier template, noise superoperators, and prefixes."""

    def __init__(self, n_features: int, cfg: TrainConfig, noise: NoiseProfile):
        self.d = n_features
        self.cfg = cfg
        self.noise = noise
        self.fm = build_zz_feature_map(np.zeros(n_features), cfg.fm_reps)
        self.an = build_ansatz(n_features, cfg.ansatz_reps)
        self.circuit = compose_classifier(self.fm, self.an)
        self.observable = cfg.observable or parity_observable(n_features)
        if self.observable.n_qubits != n_features:
            raise ValueError(
                f"observable acts on {self.observable.n_qubits} qubits, "
                f"circuit has {n_features}")
        self.noisy = noise.noisy_execution
        self.mode = DENSITY if self.noisy else STATEVECTOR
        if self.noisy and not self.observable.is_diagonal:
            raise ValueError("noisy mode samples in the Z basis; the "
                             "observable must contain only I and Z")
        self._signs = (_diagonal_signs(self.observable)
                       if self.observable.is_diagonal else None)
        stage = mask_to_channel_sets(noise.mask, noise.params)
        self.readout = stage.readout
        if self.mode == DENSITY:
            lifted = []
            for ch in stage.after_2q:
                if ch.arity == 2:
                    lifted.append([ch])
                else:
                    # per-qubit channel after a 2q gate: K (x) I then I (x) K
                    eye = np.eye(2, dtype=complex)
                    lifted.append([
                        _FakeChannel(4, tuple(np.kron(eye, k) for k in ch.operators)),
                        _FakeChannel(4, tuple(np.kron(k, eye) for k in ch.operators)),
                    ])
            flat_2q = [ch for group in lifted for ch in group]
            self._noise_sup_1q = _superoperator_matrix(stage.after_1q)
            self._noise_sup_2q = _superoperator_matrix(flat_2q)
        else:
            self._noise_sup_1q = None
            self._noise_sup_2q = None

    @property
    def n_weights(self) -> int:
        return self.an.n_trainable

    # -- batched state algebra ------------------------------------------------

    def _zero_batch(self, batch: int) -> np.ndarray:
        dim = 1 << self.d
        if self.mode == STATEVECTOR:
            states = np.zeros((batch, dim), dtype=complex)
            states[:, 0] = 1.0
        else:
            states = np.zeros((batch, dim, dim), dtype=complex)
            states[:, 0, 0] = 1.0
        return states

    def _apply_shared_gate(self, states: np.ndarray, gate: Gate) -> np.ndarray:
        """One gate with a batch-shared matrix, plus its stage noise."""
        d, k = self.d, len(gate.targets)
        mat = gate_matrix(gate)
        batch = states.shape[0]
        if self.mode == STATEVECTOR:
            tensor = states.reshape([batch] + [2] * d)
            mt = mat.reshape([2] * (2 * k))
            in_axes = [2 * k - 1 - j for j in range(k)]
            axes = [1 + (d - 1 - q) for q in gate.targets]
            out = np.tensordot(mt, tensor, axes=(in_axes, axes))
            dest = [1 + (d - 1 - gate.targets[k - 1 - i]) for i in range(k)]
            out = np.moveaxis(out, range(k), dest)
            return np.ascontiguousarray(out).reshape(batch, -1)
        sup = np.kron(mat, mat.conj())
        noise_sup = self._noise_sup_1q if k == 1 else self._noise_sup_2q
        if noise_sup is not None:
            sup = noise_sup @ sup
        return self._apply_superop(states, sup, gate.targets)

    def _apply_superop(self, states: np.ndarray, sup: np.ndarray,
                       targets: tuple[int, ...]) -> np.ndarray:
        """Contract a local superoperator over the batch's target axes."""
        d, k = self.d, len(targets)
        batch = states.shape[0]
        tensor = states.reshape([batch] + [2] * (2 * d))
        s_bits = sup.reshape([2] * (4 * k))
        in_axes = ([2 * k + (k - 1 - j) for j in range(k)]
                   + [3 * k + (k - 1 - j) for j in range(k)])
        row_axes = [1 + (d - 1 - q) for q in targets]
        col_axes = [1 + d + (d - 1 - q) for q in targets]
        out = np.tensordot(s_bits, tensor, axes=(in_axes, row_axes + col_axes))
        dest = ([1 + (d - 1 - targets[k - 1 - i]) for i in range(k)]
                + [1 + d + (d - 1 - targets[k - 1 - i]) for i in range(k)])
        out = np.moveaxis(out, range(2 * k), dest)
        dim = 1 << d
        return np.ascontiguousarray(out).reshape(batch, dim, dim)

    def _apply_phase_batch(self, states: np.ndarray, qubit: int,
                           phases: np.ndarray) -> np.ndarray:
        """Per-sample diagonal phase gate P(phi_b), then 1q stage noise."""
        d = self.d
        batch = states.shape[0]
        mult = np.ones((batch, 2), dtype=complex)
        mult[:, 1] = np.exp(1j * phases)
        if self.mode == STATEVECTOR:
            shape = [batch] + [1] * d
            shape[1 + (d - 1 - qubit)] = 2
            out = states.reshape([batch] + [2] * d) * mult.reshape(shape)
            return out.reshape(batch, -1)
        tensor = states.reshape([batch] + [2] * (2 * d))
        row_shape = [batch] + [1] * (2 * d)
        row_shape[1 + (d - 1 - qubit)] = 2
        col_shape = [batch] + [1] * (2 * d)
        col_shape[1 + d + (d - 1 - qubit)] = 2
        out = tensor * mult.reshape(row_shape) * mult.conj().reshape(col_shape)
        dim = 1 << d
        out = out.reshape(batch, dim, dim)
        if self._noise_sup_1q is not None:
            out = self._apply_superop(out, self._noise_sup_1q, (qubit,))
        return out

    def _run_prefix(self, angles: np.ndarray) -> np.ndarray:
        """Feature-map circuit on |0..0> for every sample at once."""
        states = self._zero_batch(angles.shape[0])
        for gate in self.fm.gates:
            if gate.param is None:
                states = self._apply_shared_gate(
                    states, Gate(gate.kind, gate.targets, gate.angle))
            else:
                tag = gate.param[0]
                if tag == "enc":
                    phases = 2.0 * angles[:, gate.param[1]]
                else:  # encpair
                    i, j = gate.param[1], gate.param[2]
                    phases = (2.0 * (math.pi - angles[:, i])
                              * (math.pi - angles[:, j]))
                states = self._apply_phase_batch(states, gate.targets[0], phases)
        return states

    def prepare(self, features: np.ndarray,
                angle_rng: np.random.Generator | None = None,
                shot_seed: int | None = None) -> EncodedBatch:
        """Encode a feature batch: angle map, angle noise, prefix simulation."""
        features = np.atleast_2d(np.asarray(features, dtype=float))
        if features.shape[1] != self.d:
            raise ValueError(f"expected {self.d} features, got {features.shape[1]}")
        if angle_rng is None:
            angle_rng = np.random.default_rng(
                seeding.derive(self.cfg.seed, seeding.ANGLE_NOISE_TRAIN))
        if shot_seed is None:
            shot_seed = seeding.derive(self.cfg.seed, seeding.SHOTS)
        angles = np.empty_like(features)
        for i, row in enumerate(features):
            angles[i] = inject_angle_noise(to_angles(row),
                                           self.noise.angle_sigma, angle_rng)
        states = self._run_prefix(angles)
        shot_seeds = tuple(seeding.derive(shot_seed, i)
                           for i in range(features.shape[0]))
        return EncodedBatch(angles, states, shot_seeds)

    def _measure_batch(self, states: np.ndarray, shot_seeds) -> np.ndarray:
        if self.mode == STATEVECTOR:
            probs = np.abs(states) ** 2
            if self._signs is not None:
                return probs @ self._signs
            return np.array([
                expectation(QuantumState(self.d, STATEVECTOR, psi),
                            self.observable) for psi in states])
        probs = np.clip(np.einsum("bii->bi", states).real, 0.0, None)
        probs /= probs.sum(axis=1, keepdims=True)
        if self.readout is not None:
            f01, f10 = self.readout.flip01, self.readout.flip10
            batch = probs.shape[0]
            tensor = probs.reshape([batch] + [2] * self.d)
            for q in range(self.d):
                axis = 1 + (self.d - 1 - q)
                p0 = np.take(tensor, 0, axis=axis)
                p1 = np.take(tensor, 1, axis=axis)
                tensor = np.stack(((1 - f01) * p0 + f10 * p1,
                                   f01 * p0 + (1 - f10) * p1), axis=axis)
            probs = tensor.reshape(batch, -1)
        shots = self.cfg.shots
        if shots == 0:
            return probs @ self._signs
        preds = np.empty(probs.shape[0])
        for i, seed in enumerate(shot_seeds):
            rng = np.random.default_rng(seed)
            counts = rng.multinomial(shots, probs[i])
            preds[i] = float(self._signs @ counts) / shots
        return preds

    def raw_predictions(self, batch: EncodedBatch,
                        weights: np.ndarray) -> np.ndarray:
        """Expectation of the observable for every sample at these weights."""
        tail = bind(self.an, np.empty(0), np.asarray(weights, dtype=float))
        states = batch.states
        for gate in tail:
            states = self._apply_shared_gate(states, gate)
        return self._measure_batch(states, batch.shot_seeds)


@dataclass(frozen=True)
class _FakeChannel:
    """Operator bundle for superoperator assembly (already lifted to 2q)."""

    dim: int
    operators: tuple


def predict_raw(x: np.ndarray, weights: np.ndarray, noise: NoiseProfile,
                cfg: TrainConfig, *, angle_seed: int | None = None,
                shot_seed: int | None = None) -> float:
    """Classifier raw output in [-1, 1] for one feature vector."""
    x = np.asarray(x, dtype=float)
    ex = Executor(x.shape[0], cfg, noise)
    angle_rng = np.random.default_rng(
        seeding.derive(cfg.seed, seeding.ANGLE_NOISE_TEST)
        if angle_seed is None else angle_seed)
    batch = ex.prepare(x[None, :], angle_rng, shot_seed)
    return float(ex.raw_predictions(batch, np.asarray(weights, dtype=float))[0])


def signed_targets(labels: np.ndarray) -> np.ndarray:
    """Map {0, 1} labels to {-1, +1}."""
    return 2.0 * np.asarray(labels, dtype=float) - 1.0


def _batch_loss(preds: np.ndarray, targets: np.ndarray) -> float:
    value = float(np.mean((preds - targets) ** 2))
    if not math.isfinite(value):
        raise RuntimeError(f"optimizer diverged: non-finite loss {value}")
    return value


def mse_loss(labeled: LabeledSet, weights: np.ndarray, noise: NoiseProfile,
             cfg: TrainConfig, *, angle_seed: int | None = None,
             shot_seed: int | None = None) -> float:
    """Mean of (prediction - (2y - 1))^2 over the set."""
    if len(labeled) == 0:
        raise ValueError("mse_loss requires a non-empty set")
    ex = Executor(labeled.features.shape[1], cfg, noise)
    rng = np.random.default_rng(
        seeding.derive(cfg.seed, seeding.ANGLE_NOISE_TRAIN)
        if angle_seed is None else angle_seed)
    batch = ex.prepare(labeled.features, rng, shot_seed)
    preds = ex.raw_predictions(batch, np.asarray(weights, dtype=float))
    return _batch_loss(preds, signed_targets(labeled.labels))


class _BudgetExhausted(Exception):
    pass


def nelder_mead(f, x0: np.ndarray, step: float = 0.5, max_evals: int = 100,
                diameter_tol: float = 1e-4):
    """Downhill-simplex minimizer with a hard evaluation budget.

    Standard reflection/expansion/contraction/shrink coefficients
    (1, 2, 0.5, 0.5); the initial simplex offsets each coordinate of ``x0``
    by ``step``.  Stops when ``max_evals`` function evaluations are spent
    (the budget also truncates simplex construction) or when every vertex
    lies within ``diameter_tol`` of the best one.

    Returns ``(best_x, best_f, trace)`` where ``trace[k]`` is the best value
    seen after evaluation k+1 (a non-increasing sequence).
    """
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    x0 = np.asarray(x0, dtype=float)
    dim = x0.shape[0]
    trace: list[float] = []
    best = {"x": x0.copy(), "f": math.inf}

    def call(x: np.ndarray) -> float:
        if len(trace) >= max_evals:
            raise _BudgetExhausted
        value = f(x)
        if value < best["f"]:
            best["f"], best["x"] = value, x.copy()
        trace.append(best["f"])
        return value

    try:
        simplex = [x0.copy()]
        values = [call(x0)]
        for i in range(dim):
            vertex = x0.copy()
            vertex[i] += step
            simplex.append(vertex)
            values.append(call(vertex))
        while True:
            order = np.argsort(values, kind="stable")
            simplex = [simplex[i] for i in order]
            values = [values[i] for i in order]
            spread = max(np.linalg.norm(v - simplex[0]) for v in simplex[1:])
            if spread < diameter_tol:
                break
            centroid = np.mean(simplex[:-1], axis=0)
            reflected = centroid + alpha * (centroid - simplex[-1])
            fr = call(reflected)
            if values[0] <= fr < values[-2]:
                simplex[-1], values[-1] = reflected, fr
                continue
            if fr < values[0]:
                expanded = centroid + gamma * (centroid - simplex[-1])
                fe = call(expanded)
                if fe < fr:
                    simplex[-1], values[-1] = expanded, fe
                else:
                    simplex[-1], values[-1] = reflected, fr
                continue
            contracted = centroid + rho * (simplex[-1] - centroid)
            fc = call(contracted)
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
                continue
            for i in range(1, len(simplex)):
                simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                values[i] = call(simplex[i])
    except _BudgetExhausted:
        pass
    return best["x"], best["f"], trace


def spsa(f, x0: np.ndarray, rng: np.random.Generator, max_evals: int = 100,
         a: float = 0.4, c: float = 0.2, alpha: float = 0.602,
         gamma: float = 0.101):
    """Simultaneous-perturbation stochastic approximation minimizer.

    Two evaluations per iteration with standard decaying gain sequences.
    Same return convention as :func:`nelder_mead`.
    """
    x = np.asarray(x0, dtype=float).copy()
    trace: list[float] = []
    best = {"x": x.copy(), "f": math.inf}
    stability = max_evals / 20.0

    def call(z: np.ndarray) -> float:
        if len(trace) >= max_evals:
            raise _BudgetExhausted
        value = f(z)
        if value < best["f"]:
            best["f"], best["x"] = value, z.copy()
        trace.append(best["f"])
        return value

    try:
        k = 0
        while True:
            ck = c / (k + 1) ** gamma
            ak = a / (k + 1 + stability) ** alpha
            delta = rng.choice((-1.0, 1.0), size=x.shape)
            f_plus = call(x + ck * delta)
            f_minus = call(x - ck * delta)
            x = x - ak * (f_plus - f_minus) / (2.0 * ck) * delta
            k += 1
    except _BudgetExhausted:
        pass
    return best["x"], best["f"], trace


def fit(train_set: LabeledSet, cfg: TrainConfig, noise: NoiseProfile,
        *, init_seed: int | None = None, angle_seed: int | None = None,
        shot_seed: int | None = None) -> TrainTrace:
    """Minimize the MSE loss over the trainable weights.

    The trace records the best loss after every function evaluation; runs
    are bit-identical for identical configs and seeds.
    """
    if len(train_set) == 0:
        raise ValueError("fit requires a non-empty training set")
    started = time.perf_counter()
    ex = Executor(train_set.features.shape[1], cfg, noise)
    angle_rng = np.random.default_rng(
        seeding.derive(cfg.seed, seeding.ANGLE_NOISE_TRAIN)
        if angle_seed is None else angle_seed)
    batch = ex.prepare(train_set.features, angle_rng, shot_seed)
    targets = signed_targets(train_set.labels)

    def objective(w: np.ndarray) -> float:
        return _batch_loss(ex.raw_predictions(batch, w), targets)

    init_rng = np.random.default_rng(
        seeding.derive(cfg.seed, seeding.INIT) if init_seed is None
        else init_seed)
    w0 = init_rng.uniform(-math.pi, math.pi, size=ex.n_weights)
    if cfg.optimizer == "nelder-mead":
        weights, _, trace = nelder_mead(objective, w0, cfg.simplex_step,
                                        cfg.max_iters, cfg.diameter_tol)
    else:
        spsa_rng = np.random.default_rng(
            seeding.derive(cfg.seed if init_seed is None else init_seed,
                           seeding.INIT, 1))
        weights, _, trace = spsa(objective, w0, spsa_rng, cfg.max_iters,
                                 cfg.spsa_a, cfg.spsa_c)
    return TrainTrace(tuple(trace), weights, len(trace),
                      time.perf_counter() - started)


def accuracy(labeled: LabeledSet, weights: np.ndarray, noise: NoiseProfile,
             cfg: TrainConfig, *, angle_seed: int | None = None,
             shot_seed: int | None = None) -> float:
    """Fraction of samples whose thresholded prediction matches the label.

    Predicted class is 1 when the raw output is >= 0 (ties classify as 1).
    """
    if len(labeled) == 0:
        raise ValueError("accuracy requires a non-empty set")
    ex = Executor(labeled.features.shape[1], cfg, noise)
    rng = np.random.default_rng(
        seeding.derive(cfg.seed, seeding.ANGLE_NOISE_TEST)
        if angle_seed is None else angle_seed)
    batch = ex.prepare(labeled.features, rng, shot_seed)
    preds = ex.raw_predictions(batch, np.asarray(weights, dtype=float))
    predicted = (preds >= 0.0).astype(int)
    return float(np.mean(predicted == labeled.labels))
