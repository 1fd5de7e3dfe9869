"""Embedding circuits: the layered QAOA-style ansatz and the two-qubit toy circuit."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .statevector import Circuit, Gate

__all__ = [
    "EmbeddingSpec",
    "ring_pairs",
    "weight_count",
    "embedding_template",
    "qaoa_embedding",
    "toy_pair_circuit",
]


@dataclass(frozen=True)
class EmbeddingSpec:
    n_qubits: int
    n_layers: int
    feature_dim: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if not 1 <= self.feature_dim <= self.n_qubits:
            raise ValueError(
                f"feature_dim={self.feature_dim} must lie in [1, n_qubits={self.n_qubits}]"
            )


def ring_pairs(n_qubits: int) -> list:
    """Nearest-neighbour ring (0,1), (1,2), ..., (n-1,0); a single pair for n=2."""
    if n_qubits == 1:
        return []
    if n_qubits == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n_qubits) for q in range(n_qubits)]


def weight_count(spec: EmbeddingSpec) -> int:
    return spec.n_layers * (len(ring_pairs(spec.n_qubits)) + spec.n_qubits)


def _feature_sublayer(spec: EmbeddingSpec) -> list:
    gates = []
    for q in range(spec.n_qubits):
        if q < spec.feature_dim:
            gates.append(Gate("RX", (q,), 0.0, ("feature", q)))
        else:
            gates.append(Gate("RX", (q,), 0.0))
    return gates


@lru_cache(maxsize=None)
def embedding_template(spec: EmbeddingSpec) -> Circuit:
    """Unbound QAOA embedding: all angles zero, slots tagged.

    Each layer is a feature RX sublayer, trainable RZZ couplings on the ring,
    and a trainable RY on every qubit. One more feature sublayer closes the
    circuit, so every feature slot occurs ``n_layers + 1`` times.
    """
    gates = []
    w = 0
    for _ in range(spec.n_layers):
        gates.extend(_feature_sublayer(spec))
        for pair in ring_pairs(spec.n_qubits):
            gates.append(Gate("RZZ", pair, 0.0, ("weight", w)))
            w += 1
        for q in range(spec.n_qubits):
            gates.append(Gate("RY", (q,), 0.0, ("weight", w)))
            w += 1
    gates.extend(_feature_sublayer(spec))
    return Circuit(spec.n_qubits, tuple(gates))


def qaoa_embedding(spec: EmbeddingSpec, x, w) -> Circuit:
    x = np.asarray(x, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float).reshape(-1)
    if x.shape[0] != spec.feature_dim:
        raise ValueError(f"expected {spec.feature_dim} features, got {x.shape[0]}")
    if w.shape[0] != weight_count(spec):
        raise ValueError(f"expected {weight_count(spec)} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    return embedding_template(spec).bind(x, w)


def toy_pair_circuit(x: float, x_tilde: float) -> Circuit:
    """Two-qubit pair embedding with a closed-form unitary.

    In time order: RX(x_tilde) on qubit 0, CNOT(0 -> 1), RY(x) on qubit 0.
    As an operator product this is ``RY(x)_0 . CNOT(0,1) . RX(x_tilde)_0``.
    The angles are tagged as feature slots 0 (``x``) and 1 (``x_tilde``).
    """
    return Circuit(
        2,
        (
            Gate("RX", (0,), float(x_tilde), ("feature", 1)),
            Gate("CNOT", (0, 1)),
            Gate("RY", (0,), float(x), ("feature", 0)),
        ),
    )
