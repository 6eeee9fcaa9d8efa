"""Quantum simulation core: states, gates, and the two execution engines.

Two state representations are supported and tagged by ``mode``: a pure
statevector (2^n complex amplitudes) for ideal execution, and a density
matrix (2^n x 2^n) for noisy execution under Kraus channels.

Conventions, fixed once to avoid silent tensor-order bugs:

* Qubit 0 is the least-significant bit of the computational-basis index.
* Gates are applied by contracting only the target-qubit axes of the state
  reshaped to ``[2] * n`` (or ``[2] * 2n`` for density matrices); the full
  2^n x 2^n unitary is never materialized.
* For multi-qubit gates, ``targets[0]`` is the least-significant bit of the
  gate-local index; e.g. ``Gate("cx", (c, t))`` controls on qubit ``c``.
* Bitstring keys returned by :func:`sample_counts` are written
  most-significant qubit first (qubit n-1 is the leftmost character).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .channels import KrausChannel, ReadoutModel

STATEVECTOR = "statevector"
DENSITY = "density"

GATE_KINDS = ("h", "rx", "ry", "rz", "p", "cx", "cz", "rzz")
PARAMETERIZED_KINDS = ("rx", "ry", "rz", "p", "rzz")
TWO_QUBIT_KINDS = ("cx", "cz", "rzz")

NORM_ATOL = 1e-10
HERM_ATOL = 1e-10
PSD_FLOOR = -1e-9
IMAG_RESIDUE_LIMIT = 1e-8
COMPLETENESS_ATOL = 1e-10

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI_BY_LABEL = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def _cx_matrix() -> np.ndarray:
    # local index = target_bit * 2 + control_bit (targets[0] = control = LSB)
    m = np.zeros((4, 4), dtype=complex)
    for c in (0, 1):
        for t in (0, 1):
            m[((t ^ c) << 1) | c, (t << 1) | c] = 1.0
    return m


_CX = _cx_matrix()
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass(frozen=True)
class Gate:
    """One concrete gate: kind, target qubits, and angle for rotation kinds."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != n_targets:
            raise ValueError(
                f"{self.kind} takes {n_targets} target(s), got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets {self.targets}")
        if self.kind in PARAMETERIZED_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} requires a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense unitary of ``gate`` on its own qubits (2x2 or 4x4)."""
    kind, theta = gate.kind, gate.angle
    if kind == "h":
        return _H
    if kind == "cx":
        return _CX
    if kind == "cz":
        return _CZ
    if kind == "rx":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if kind == "p":
        return np.diag([1.0, np.exp(1j * theta)]).astype(complex)
    if kind == "rzz":
        a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
        return np.diag([a, b, b, a])
    raise ValueError(f"unknown gate kind {kind!r}")  # pragma: no cover


@dataclass
class QuantumState:
    """State of ``n_qubits`` qubits in statevector or density-matrix mode."""

    n_qubits: int
    mode: str
    data: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


def zero_state(n_qubits: int, mode: str = STATEVECTOR) -> QuantumState:
    """|0...0> in the requested representation."""
    dim = 1 << n_qubits
    if mode == STATEVECTOR:
        data = np.zeros(dim, dtype=complex)
        data[0] = 1.0
    elif mode == DENSITY:
        data = np.zeros((dim, dim), dtype=complex)
        data[0, 0] = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return QuantumState(n_qubits, mode, data)


def statevector_to_density(state: QuantumState) -> QuantumState:
    """rho = |psi><psi| for a statevector-mode state."""
    if state.mode != STATEVECTOR:
        raise ValueError("statevector_to_density requires statevector mode")
    psi = state.data
    return QuantumState(state.n_qubits, DENSITY, np.outer(psi, psi.conj()))


def validate_state(state: QuantumState, check_psd: bool = False) -> None:
    """Assert the mode-specific invariants; test/debug path, not per-gate.

    Statevector: unit norm.  Density matrix: Hermitian, unit trace, and
    (optionally, O(2^3n)) eigenvalues above the PSD floor.
    """
    if not np.all(np.isfinite(state.data.view(np.float64))):
        raise ValueError("state contains non-finite entries")
    if state.mode == STATEVECTOR:
        if state.data.shape != (state.dim,):
            raise ValueError("statevector has wrong shape")
        if abs(np.linalg.norm(state.data) - 1.0) > NORM_ATOL:
            raise ValueError("statevector is not normalized")
    elif state.mode == DENSITY:
        rho = state.data
        if rho.shape != (state.dim, state.dim):
            raise ValueError("density matrix has wrong shape")
        if np.abs(rho - rho.conj().T).max() > HERM_ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > NORM_ATOL:
            raise ValueError("density matrix trace is not 1")
        if check_psd and np.linalg.eigvalsh(rho).min() < PSD_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
    else:
        raise ValueError(f"unknown mode {state.mode!r}")


def _check_targets(n_qubits: int, targets: tuple[int, ...]) -> None:
    for q in targets:
        if not 0 <= q < n_qubits:
            raise ValueError(f"target qubit {q} out of range for {n_qubits} qubits")


def _contract(tensor: np.ndarray, mat: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract ``mat`` (2^k x 2^k, reshaped) into the given tensor axes.

    ``axes[j]`` is the tensor axis holding the j-th gate-local bit
    (``targets[j]``, the LSB of the local index for j = 0).
    """
    k = len(axes)
    mt = mat.reshape([2] * (2 * k))
    in_axes = [2 * k - 1 - j for j in range(k)]
    out = np.tensordot(mt, tensor, axes=(in_axes, axes))
    # tensordot leaves the k output-bit axes in front (MSB first); restore them
    dest = [axes[k - 1 - i] for i in range(k)]
    return np.moveaxis(out, range(k), dest)


def _apply_unitary_sv(psi: np.ndarray, n: int, mat: np.ndarray,
                      targets: tuple[int, ...]) -> np.ndarray:
    axes = [n - 1 - q for q in targets]
    out = _contract(psi.reshape([2] * n), mat, axes)
    return np.ascontiguousarray(out).reshape(-1)


def _apply_left_dm(rho_t: np.ndarray, n: int, mat: np.ndarray,
                   targets: tuple[int, ...]) -> np.ndarray:
    # U rho: contract row axes
    return _contract(rho_t, mat, [n - 1 - q for q in targets])


def _apply_right_dag_dm(rho_t: np.ndarray, n: int, mat: np.ndarray,
                        targets: tuple[int, ...]) -> np.ndarray:
    # rho U+: (rho U+)_{rc} = sum_c' rho_{rc'} conj(U)_{cc'}; column axes
    return _contract(rho_t, mat.conj(), [2 * n - 1 - q for q in targets])


def _sandwich_dm(rho_t: np.ndarray, n: int, mat: np.ndarray,
                 targets: tuple[int, ...]) -> np.ndarray:
    return _apply_right_dag_dm(_apply_left_dm(rho_t, n, mat, targets), n, mat, targets)


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Apply one gate: |psi> -> U|psi> or rho -> U rho U+."""
    _check_targets(state.n_qubits, gate.targets)
    n = state.n_qubits
    mat = gate_matrix(gate)
    if state.mode == STATEVECTOR:
        data = _apply_unitary_sv(state.data, n, mat, gate.targets)
    elif state.mode == DENSITY:
        rho_t = state.data.reshape([2] * (2 * n))
        data = np.ascontiguousarray(
            _sandwich_dm(rho_t, n, mat, gate.targets)).reshape(state.dim, state.dim)
    else:
        raise ValueError(f"unknown mode {state.mode!r}")
    return QuantumState(n, state.mode, data)


def apply_circuit(state: QuantumState, gates) -> QuantumState:
    """Apply a sequence of gates in order (no noise)."""
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def apply_kraus(state: QuantumState, channel: "KrausChannel",
                targets: tuple[int, ...]) -> QuantumState:
    """rho -> sum_i (K_i on targets) rho (K_i on targets)+.

    Reference implementation of CPTP-map application; rejects channels whose
    operators do not satisfy completeness, and statevector-mode inputs.
    """
    if state.mode != DENSITY:
        raise ValueError("apply_kraus requires density-matrix mode")
    if channel.arity != len(targets):
        raise ValueError(
            f"channel arity {channel.arity} does not match targets {targets}")
    _check_targets(state.n_qubits, targets)
    dim = 1 << channel.arity
    total = np.zeros((dim, dim), dtype=complex)
    for op in channel.operators:
        total += op.conj().T @ op
    if np.abs(total - np.eye(dim)).max() > COMPLETENESS_ATOL:
        raise ValueError(f"channel {channel.label!r} violates Kraus completeness")
    n = state.n_qubits
    rho_t = state.data.reshape([2] * (2 * n))
    out = np.zeros_like(rho_t)
    for op in channel.operators:
        out = out + _sandwich_dm(rho_t, n, op, targets)
    return QuantumState(n, DENSITY,
                        np.ascontiguousarray(out).reshape(state.dim, state.dim))


@dataclass(frozen=True)
class Observable:
    """Tensor product of single-qubit Paulis; ``labels[q]`` acts on qubit q."""

    pauli_string: str

    def __post_init__(self):
        bad = set(self.pauli_string) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli labels {sorted(bad)}")

    @property
    def n_qubits(self) -> int:
        return len(self.pauli_string)

    @property
    def is_diagonal(self) -> bool:
        return set(self.pauli_string) <= {"I", "Z"}


def parity_observable(n_qubits: int) -> Observable:
    """Full parity Z x Z x ... x Z."""
    return Observable("Z" * n_qubits)


def _diagonal_signs(obs: Observable) -> np.ndarray:
    """(-1)^(popcount over Z positions) for each basis index."""
    k = np.arange(1 << obs.n_qubits)
    signs = np.ones(k.shape[0], dtype=float)
    for q, label in enumerate(obs.pauli_string):
        if label == "Z":
            signs *= 1.0 - 2.0 * ((k >> q) & 1)
    return signs


def expectation(state: QuantumState, obs: Observable) -> float:
    """<O> = <psi|O|psi> or tr(rho O); result is real in [-1, 1]."""
    if obs.n_qubits != state.n_qubits:
        raise ValueError(
            f"observable length {obs.n_qubits} != {state.n_qubits} qubits")
    n = state.n_qubits
    if obs.is_diagonal:
        signs = _diagonal_signs(obs)
        if state.mode == STATEVECTOR:
            value = complex(np.dot(signs, np.abs(state.data) ** 2))
        else:
            value = complex(np.dot(signs, np.diagonal(state.data)))
    elif state.mode == STATEVECTOR:
        phi = state.data
        for q, label in enumerate(obs.pauli_string):
            if label != "I":
                phi = _apply_unitary_sv(phi, n, _PAULI_BY_LABEL[label], (q,))
        value = complex(np.vdot(state.data, phi))
    else:
        rho_t = state.data.reshape([2] * (2 * n))
        for q, label in enumerate(obs.pauli_string):
            if label != "I":
                rho_t = _apply_left_dm(rho_t, n, _PAULI_BY_LABEL[label], (q,))
        value = complex(np.trace(rho_t.reshape(state.dim, state.dim)))
    if abs(value.imag) >= IMAG_RESIDUE_LIMIT:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def basis_probabilities(state: QuantumState) -> np.ndarray:
    """Computational-basis distribution: |a_k|^2 or diag(rho)."""
    if state.mode == STATEVECTOR:
        probs = np.abs(state.data) ** 2
    else:
        probs = np.diagonal(state.data).real.copy()
    if probs.min() < PSD_FLOOR:
        raise ValueError("negative basis probability beyond tolerance")
    np.clip(probs, 0.0, None, out=probs)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (sum of probs {total:.6g})")
    return probs / total


def _apply_readout(probs: np.ndarray, n: int, readout: "ReadoutModel") -> np.ndarray:
    """Post-compose the per-qubit confusion matrix with the distribution."""
    f01, f10 = readout.flip01, readout.flip10
    tensor = probs.reshape([2] * n)
    for q in range(n):
        axis = n - 1 - q
        p0 = np.take(tensor, 0, axis=axis)
        p1 = np.take(tensor, 1, axis=axis)
        tensor = np.stack(((1 - f01) * p0 + f10 * p1,
                           f01 * p0 + (1 - f10) * p1), axis=axis)
    return tensor.reshape(-1)


def sample_counts(state: QuantumState, shots: int, rng: np.random.Generator,
                  readout: "ReadoutModel | None" = None) -> dict[str, int]:
    """Sample ``shots`` basis measurements; returns {bitstring: count}.

    Keys are written qubit n-1 first; zero-count outcomes are omitted.
    Deterministic for a fixed generator state.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = state.n_qubits
    probs = basis_probabilities(state)
    if readout is not None:
        probs = _apply_readout(probs, n, readout)
    counts = rng.multinomial(shots, probs)
    return {format(k, f"0{n}b"): int(c) for k, c in enumerate(counts) if c}


def counts_expectation(counts: dict[str, int], obs: Observable) -> float:
    """Estimate a diagonal (I/Z) observable from a sampled histogram."""
    if not obs.is_diagonal:
        raise ValueError("sampled estimation supports I/Z observables only")
    n = obs.n_qubits
    total = 0
    acc = 0
    for bits, c in counts.items():
        sign = 1
        for q, label in enumerate(obs.pauli_string):
            if label == "Z" and bits[n - 1 - q] == "1":
                sign = -sign
        acc += sign * c
        total += c
    return acc / total
