"""Quantum noise channels and the circuit-noise configuration lattice.

Channel constructors return immutable Kraus-operator sets validated for
completeness.  Four channel families are toggled independently, giving the
2^4 = 16 circuit-noise configurations; classical readout error is a separate
per-qubit confusion matrix, disabled by default and not part of the lattice.

Depolarizing uses the rho -> (1-p) rho + p I/2^n convention (the Qiskit Aer
error model), not the p/3-Pauli convention.  Within one noise stage the
application order is fixed: depolarizing -> amplitude damping -> phase
damping -> Pauli.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z

KRAUS_ATOL = 1e-12

_PAULIS_1Q = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map given by operators {K_i} with sum K_i+ K_i = I."""

    arity: int
    operators: tuple[np.ndarray, ...]
    label: str

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError("channel arity must be 1 or 2")
        dim = 1 << self.arity
        total = np.zeros((dim, dim), dtype=complex)
        for op in self.operators:
            if op.shape != (dim, dim):
                raise ValueError(f"Kraus operator shape {op.shape} != ({dim},{dim})")
            total += op.conj().T @ op
        if np.abs(total - np.eye(dim)).max() > KRAUS_ATOL:
            raise ValueError(f"channel {self.label!r} violates completeness")
        object.__setattr__(
            self, "operators",
            tuple(np.ascontiguousarray(op, dtype=complex) for op in self.operators))

    @property
    def dim(self) -> int:
        return 1 << self.arity


def identity_channel(arity: int = 1) -> KrausChannel:
    return KrausChannel(arity, (np.eye(1 << arity, dtype=complex),), "identity")


def depolarizing(p: float, arity: int = 1) -> KrausChannel:
    """rho -> (1-p) rho + p I/2^arity via the uniform-Pauli decomposition."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if p == 0.0:
        return identity_channel(arity)
    n_paulis = 4 ** arity
    if arity == 1:
        paulis = list(_PAULIS_1Q)
    else:
        paulis = [np.kron(high, low)
                  for high, low in itertools.product(_PAULIS_1Q, _PAULIS_1Q)]
    ops = [math.sqrt(1.0 - p * (n_paulis - 1) / n_paulis) * paulis[0]]
    ops += [math.sqrt(p / n_paulis) * pm for pm in paulis[1:]]
    return KrausChannel(arity, tuple(ops), f"depolarizing(p={p})")


def amplitude_damping(gamma: float) -> KrausChannel:
    """T1-style relaxation toward |0>."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping parameter {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(1, (k0, k1), f"amplitude_damping(gamma={gamma})")


def phase_damping(gamma: float) -> KrausChannel:
    """T2-style dephasing; populations (diagonal of rho) are invariant."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping parameter {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, math.sqrt(gamma)]], dtype=complex)
    return KrausChannel(1, (k0, k1), f"phase_damping(gamma={gamma})")


def pauli_channel(px: float, py: float, pz: float) -> KrausChannel:
    """Stochastic X, Y, Z errors with the given probabilities."""
    for p in (px, py, pz):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Pauli probability {p} outside [0, 1]")
    rest = 1.0 - px - py - pz
    if rest < -1e-15:
        raise ValueError(f"Pauli probabilities sum to {px + py + pz} > 1")
    ops = (math.sqrt(max(rest, 0.0)) * PAULI_I, math.sqrt(px) * PAULI_X,
           math.sqrt(py) * PAULI_Y, math.sqrt(pz) * PAULI_Z)
    return KrausChannel(1, ops, f"pauli(px={px},py={py},pz={pz})")


def _superoperator(channel: KrausChannel) -> np.ndarray:
    """Row-major-vec superoperator S = sum_i K_i (x) conj(K_i)."""
    d = channel.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for op in channel.operators:
        s += np.kron(op, op.conj())
    return s


def _kraus_from_superoperator(s: np.ndarray, arity: int, label: str) -> KrausChannel:
    """Minimal Kraus set via eigendecomposition of the Choi matrix."""
    d = 1 << arity
    choi = s.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)
    choi = 0.5 * (choi + choi.conj().T)
    evals, evecs = np.linalg.eigh(choi)
    ops = []
    for lam, vec in zip(evals[::-1], evecs.T[::-1]):
        if lam <= 1e-14:  # numerical-noise eigenvalues of the PSD Choi matrix
            break
        ops.append(math.sqrt(lam) * vec.reshape(d, d).T)
    return KrausChannel(arity, tuple(ops), label)


def compose(channels: "list[KrausChannel] | tuple[KrausChannel, ...]") -> KrausChannel:
    """CPTP composite applying ``channels[0]`` first; exact, minimal rank."""
    if not channels:
        raise ValueError("compose requires at least one channel")
    arity = channels[0].arity
    if any(ch.arity != arity for ch in channels):
        raise ValueError("compose requires equal arity")
    s = _superoperator(channels[0])
    for ch in channels[1:]:
        s = _superoperator(ch) @ s
    label = "+".join(ch.label for ch in channels)
    return _kraus_from_superoperator(s, arity, label)


def tensor(low: KrausChannel, high: KrausChannel) -> KrausChannel:
    """Two-qubit product channel: ``low`` on targets[0], ``high`` on targets[1]."""
    if low.arity != 1 or high.arity != 1:
        raise ValueError("tensor combines two single-qubit channels")
    ops = tuple(np.kron(kh, kl)
                for kl in low.operators for kh in high.operators)
    return KrausChannel(2, ops, f"({low.label})x({high.label})")


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit classical bit-flip confusion; row-stochastic 2x2 matrix."""

    flip01: float = 0.02
    flip10: float = 0.02

    def __post_init__(self):
        for p in (self.flip01, self.flip10):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"flip probability {p} outside [0, 1]")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1 - self.flip01, self.flip01],
                         [self.flip10, 1 - self.flip10]])


@dataclass(frozen=True)
class CircuitNoiseMask:
    """Which channel families are active; four flags span the 16-cell lattice."""

    depolarizing: bool = False
    amplitude_damping: bool = False
    phase_damping: bool = False
    pauli: bool = False
    readout_enabled: bool = False

    @property
    def index(self) -> int:
        """Binary-counting index over [depol, AD, PD, Pauli]; 0 = noise-free."""
        return (int(self.depolarizing) | int(self.amplitude_damping) << 1
                | int(self.phase_damping) << 2 | int(self.pauli) << 3)

    @property
    def bits(self) -> str:
        """Flag string in [depol, AD, PD, Pauli] order, e.g. '1000'."""
        return "".join(str(int(f)) for f in (self.depolarizing,
                                             self.amplitude_damping,
                                             self.phase_damping, self.pauli))

    @property
    def any_channel(self) -> bool:
        return self.index != 0


def mask_from_index(index: int, readout_enabled: bool = False) -> CircuitNoiseMask:
    if not 0 <= index < 16:
        raise ValueError(f"mask index {index} outside [0, 16)")
    return CircuitNoiseMask(bool(index & 1), bool(index & 2), bool(index & 4),
                            bool(index & 8), readout_enabled)


def enumerate_masks() -> list[CircuitNoiseMask]:
    """All 16 masks in binary-counting order; element 0 is the baseline."""
    return [mask_from_index(i) for i in range(16)]


@dataclass(frozen=True)
class NoiseParams:
    """Channel strengths; defaults are the reference hardware-noise levels."""

    depol_p: float = 0.05
    ad_gamma: float = 0.05
    pd_gamma: float = 0.05
    pauli_p: float = 0.02
    readout_flip01: float = 0.02
    readout_flip10: float = 0.02

    @property
    def pauli_probs(self) -> tuple[float, float, float]:
        # single Pauli strength split evenly across X, Y, Z
        p = self.pauli_p / 3.0
        return (p, p, p)


@dataclass(frozen=True)
class StageChannels:
    """Per-stage channel lists produced from a mask.

    ``after_1q`` channels apply to the target of every single-qubit gate.
    ``after_2q`` channels apply after every two-qubit gate: arity-2 entries
    act on the gate's qubit pair, arity-1 entries act on each qubit in
    target order.  ``readout`` applies at measurement only.
    """

    after_1q: tuple[KrausChannel, ...]
    after_2q: tuple[KrausChannel, ...]
    readout: ReadoutModel | None


def mask_to_channel_sets(mask: CircuitNoiseMask,
                         params: NoiseParams = NoiseParams()) -> StageChannels:
    """Expand a mask into per-stage channel lists at the given strengths."""
    one_q: list[KrausChannel] = []
    two_q: list[KrausChannel] = []
    if mask.depolarizing:
        one_q.append(depolarizing(params.depol_p, 1))
        two_q.append(depolarizing(params.depol_p, 2))
    if mask.amplitude_damping:
        ch = amplitude_damping(params.ad_gamma)
        one_q.append(ch)
        two_q.append(ch)
    if mask.phase_damping:
        ch = phase_damping(params.pd_gamma)
        one_q.append(ch)
        two_q.append(ch)
    if mask.pauli:
        ch = pauli_channel(*params.pauli_probs)
        one_q.append(ch)
        two_q.append(ch)
    readout = (ReadoutModel(params.readout_flip01, params.readout_flip10)
               if mask.readout_enabled else None)
    return StageChannels(tuple(one_q), tuple(two_q), readout)


@dataclass(frozen=True)
class NoiseProfile:
    """Everything about one execution-noise condition except dataset noise."""

    mask: CircuitNoiseMask = field(default_factory=CircuitNoiseMask)
    params: NoiseParams = field(default_factory=NoiseParams)
    angle_sigma: float = 0.0

    def __post_init__(self):
        if self.angle_sigma < 0.0:
            raise ValueError("angle_sigma must be >= 0")

    @property
    def noisy_execution(self) -> bool:
        return self.mask.any_channel or self.mask.readout_enabled


IDEAL = NoiseProfile()
