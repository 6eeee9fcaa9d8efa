"""Parameterized circuits: hardware-efficient ansatz, composition, binding.

A :class:`ParameterizedCircuit` is an ordered gate list in which rotation
angles may be symbolic slots.  Slots come in two disjoint namespaces:
encoding slots (``x0..x{d-1}``, bound to feature angles) and trainable slots
(``w0..``, bound to optimizer weights).  Because the ZZ entangling phase is a
nonlinear function of two encoding angles, each symbolic gate records a small
expression over the slots rather than a bare slot id:

* ``("enc", i)``      -> angle = 2 * theta_i
* ``("encpair", i, j)``-> angle = 2 * (pi - theta_i) * (pi - theta_j)
* ``("weight", k)``   -> angle = w_k

Circuits are immutable; :func:`bind` evaluates every expression and returns
a concrete, executable gate list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import Gate, TWO_QUBIT_KINDS

ParamExpr = tuple


@dataclass(frozen=True)
class CircuitGate:
    """A gate whose angle is either fixed (``angle``) or symbolic (``param``)."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None
    param: ParamExpr | None = None

    def bound(self, encoding: np.ndarray, weights: np.ndarray) -> Gate:
        if self.param is None:
            return Gate(self.kind, self.targets, self.angle)
        tag = self.param[0]
        if tag == "enc":
            angle = 2.0 * encoding[self.param[1]]
        elif tag == "encpair":
            i, j = self.param[1], self.param[2]
            angle = 2.0 * (math.pi - encoding[i]) * (math.pi - encoding[j])
        elif tag == "weight":
            angle = weights[self.param[1]]
        else:
            raise ValueError(f"unknown parameter expression {self.param!r}")
        return Gate(self.kind, self.targets, float(angle))


@dataclass(frozen=True)
class ParameterizedCircuit:
    """Ordered gate list with named encoding and trainable slot counts."""

    n_qubits: int
    gates: tuple[CircuitGate, ...]
    n_encoding: int
    n_trainable: int

    def __post_init__(self):
        for g in self.gates:
            expected = 2 if g.kind in TWO_QUBIT_KINDS else 1
            if len(g.targets) != expected or any(
                    not 0 <= q < self.n_qubits for q in g.targets):
                raise ValueError(f"gate {g.kind} targets {g.targets} invalid "
                                 f"for {self.n_qubits} qubits")

    @property
    def encoding_slots(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(self.n_encoding))

    @property
    def trainable_slots(self) -> tuple[str, ...]:
        return tuple(f"w{k}" for k in range(self.n_trainable))


def empty_circuit(n_qubits: int) -> ParameterizedCircuit:
    return ParameterizedCircuit(n_qubits, (), 0, 0)


def build_ansatz(n_qubits: int, reps: int = 2) -> ParameterizedCircuit:
    """RY rotation layers interleaved with a linear CX chain.

    ``reps`` blocks of [RY on every qubit; CX(0,1), CX(1,2), ...] followed by
    one final RY layer; n_qubits * (reps + 1) trainable slots.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gates: list[CircuitGate] = []
    slot = 0
    for layer in range(reps + 1):
        for q in range(n_qubits):
            gates.append(CircuitGate("ry", (q,), param=("weight", slot)))
            slot += 1
        if layer < reps:
            for q in range(n_qubits - 1):
                gates.append(CircuitGate("cx", (q, q + 1)))
    return ParameterizedCircuit(n_qubits, tuple(gates), 0, slot)


def compose_classifier(feature_map: ParameterizedCircuit,
                       ansatz: ParameterizedCircuit) -> ParameterizedCircuit:
    """Concatenate feature map and ansatz; encoding slots first."""
    if feature_map.n_qubits != ansatz.n_qubits:
        raise ValueError(
            f"qubit-count mismatch: {feature_map.n_qubits} != {ansatz.n_qubits}")
    if feature_map.n_trainable or ansatz.n_encoding:
        raise ValueError("compose expects (encoding fragment, trainable fragment)")
    return ParameterizedCircuit(feature_map.n_qubits,
                                feature_map.gates + ansatz.gates,
                                feature_map.n_encoding, ansatz.n_trainable)


def bind(circuit: ParameterizedCircuit, encoding_values,
         weights) -> list[Gate]:
    """Evaluate every slot and return a concrete, executable gate list."""
    enc = np.asarray(encoding_values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if enc.shape != (circuit.n_encoding,):
        raise ValueError(f"expected {circuit.n_encoding} encoding values, "
                         f"got shape {enc.shape}")
    if w.shape != (circuit.n_trainable,):
        raise ValueError(f"expected {circuit.n_trainable} weights, "
                         f"got shape {w.shape}")
    if enc.size and not np.all(np.isfinite(enc)):
        raise ValueError("non-finite encoding values")
    if w.size and not np.all(np.isfinite(w)):
        raise ValueError("non-finite weights")
    return [g.bound(enc, w) for g in circuit.gates]


def initial_weights(circuit: ParameterizedCircuit,
                    rng: np.random.Generator) -> np.ndarray:
    """Deterministic U(-pi, pi) draws for every trainable slot."""
    return rng.uniform(-math.pi, math.pi, size=circuit.n_trainable)
