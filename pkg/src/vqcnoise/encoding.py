"""Classical-side noise injection and quantum feature encoding.

Covers the first two rungs of the noise hierarchy: corruption of normalized
feature vectors (nine labeled conditions including the clean baseline), and
Gaussian perturbation of the encoding rotation angles wrapped to the periodic
domain, plus the ZZ feature-map circuit builder that embeds the angles.

Injector formulas (x is a feature vector with entries in [0, 1]; every
result is clipped back to [0, 1]):

* clean:            x
* gaussian:         x + n,        n ~ N(0, sigma^2)
* uniform:          x + u,        u ~ U(-eps, eps)
* salt_pepper:      entry -> 0 or 1 (fair coin) with probability r
* multiplicative:   x * (1 + n),  n ~ N(0, sigma^2)
* speckle:          x + x * n,    n ~ N(0, sigma^2)
* quantization:     snap the encoding angle 2*pi*(x - 0.5) to a grid of
                    step delta, then map back
* feature_dropout:  entry -> 0 with probability p_d
* random_sign:      x + s * eps,  s uniform on {-1, +1}

Every injector is bit-exact identity when its strength parameter is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import CircuitGate, ParameterizedCircuit

TWO_PI = 2.0 * math.pi

NOISE_KINDS = ("clean", "gaussian", "uniform", "salt_pepper", "multiplicative",
               "speckle", "quantization", "feature_dropout", "random_sign")

DEFAULT_ANGLE_SIGMAS = (0.0, 0.01, 0.03, 0.05)


@dataclass(frozen=True)
class DatasetNoiseSpec:
    """One dataset-corruption condition: a kind plus its strength knobs."""

    kind: str = "clean"
    sigma: float = 0.05            # gaussian / multiplicative / speckle std
    epsilon: float = 0.05          # uniform / random_sign bound
    impulse_ratio: float = 0.03    # salt_pepper replacement probability
    dropout_p: float = 0.05        # feature_dropout zeroing probability
    step: float = math.pi / 255    # quantization grid in angle space

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown dataset-noise kind {self.kind!r}")
        if self.sigma < 0 or self.epsilon < 0 or self.step < 0:
            raise ValueError("noise strengths must be >= 0")
        for p in (self.impulse_ratio, self.dropout_p):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")


def inject_dataset_noise(x: np.ndarray, spec: DatasetNoiseSpec,
                         rng: np.random.Generator) -> np.ndarray:
    """Corrupt one feature vector; deterministic under a fixed generator."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("feature vector has non-finite entries")
    kind = spec.kind
    if kind == "clean":
        return x.copy()
    if kind == "gaussian":
        if spec.sigma == 0.0:
            return x.copy()
        return np.clip(x + rng.normal(0.0, spec.sigma, x.shape), 0.0, 1.0)
    if kind == "uniform":
        if spec.epsilon == 0.0:
            return x.copy()
        return np.clip(x + rng.uniform(-spec.epsilon, spec.epsilon, x.shape),
                       0.0, 1.0)
    if kind == "salt_pepper":
        if spec.impulse_ratio == 0.0:
            return x.copy()
        out = x.copy()
        hit = rng.random(x.shape) < spec.impulse_ratio
        out[hit] = (rng.random(x.shape) < 0.5).astype(float)[hit]
        return out
    if kind == "multiplicative":
        if spec.sigma == 0.0:
            return x.copy()
        return np.clip(x * (1.0 + rng.normal(0.0, spec.sigma, x.shape)), 0.0, 1.0)
    if kind == "speckle":
        if spec.sigma == 0.0:
            return x.copy()
        return np.clip(x + x * rng.normal(0.0, spec.sigma, x.shape), 0.0, 1.0)
    if kind == "quantization":
        if spec.step == 0.0:
            return x.copy()
        theta = TWO_PI * (x - 0.5)
        snapped = np.round(theta / spec.step) * spec.step
        return np.clip(snapped / TWO_PI + 0.5, 0.0, 1.0)
    if kind == "feature_dropout":
        if spec.dropout_p == 0.0:
            return x.copy()
        out = x.copy()
        out[rng.random(x.shape) < spec.dropout_p] = 0.0
        return out
    if kind == "random_sign":
        if spec.epsilon == 0.0:
            return x.copy()
        signs = np.where(rng.random(x.shape) < 0.5, -1.0, 1.0)
        return np.clip(x + signs * spec.epsilon, 0.0, 1.0)
    raise ValueError(f"unknown dataset-noise kind {kind!r}")  # pragma: no cover


def to_angles(x: np.ndarray) -> np.ndarray:
    """theta_i = 2*pi*(x_i - 0.5), mapping [0, 1] onto [-pi, pi]."""
    x = np.asarray(x, dtype=float)
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("feature entries must lie in [0, 1]")
    return TWO_PI * (x - 0.5)


def from_angles(theta: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_angles`."""
    return np.asarray(theta, dtype=float) / TWO_PI + 0.5


def wrap_angle(theta: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi] by adding multiples of 2*pi."""
    theta = np.asarray(theta, dtype=float)
    return theta - TWO_PI * np.ceil((theta - math.pi) / TWO_PI)


def inject_angle_noise(theta: np.ndarray, sigma: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Add N(0, sigma^2) to each angle and wrap; sigma = 0 is the identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    theta = np.asarray(theta, dtype=float)
    if sigma == 0.0:
        return theta.copy()
    return wrap_angle(theta + rng.normal(0.0, sigma, theta.shape))


def build_zz_feature_map(theta: np.ndarray, reps: int = 2) -> ParameterizedCircuit:
    """Phase-encoding circuit with pairwise ZZ entanglement on a linear chain.

    Per repetition: H on every qubit, P(2*theta_i) on qubit i, then for each
    adjacent pair (i, i+1): CX, P(2*(pi - theta_i)*(pi - theta_j)) on the
    second qubit, CX.  A single qubit degenerates to H + P(2*theta).

    The returned fragment carries the given angles as its current binding and
    remains rebindable through its encoding slots.
    """
    theta = np.asarray(theta, dtype=float)
    d = theta.shape[0]
    if d < 1:
        raise ValueError("need at least one feature angle")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not np.all(np.isfinite(theta)):
        raise ValueError("non-finite angles")
    gates: list[CircuitGate] = []
    for _ in range(reps):
        for q in range(d):
            gates.append(CircuitGate("h", (q,)))
        for q in range(d):
            gates.append(CircuitGate("p", (q,), angle=2.0 * theta[q],
                                     param=("enc", q)))
        for q in range(d - 1):
            phase = 2.0 * (math.pi - theta[q]) * (math.pi - theta[q + 1])
            gates.append(CircuitGate("cx", (q, q + 1)))
            gates.append(CircuitGate("p", (q + 1,), angle=phase,
                                     param=("encpair", q, q + 1)))
            gates.append(CircuitGate("cx", (q, q + 1)))
    return ParameterizedCircuit(d, tuple(gates), d, 0)
