"""Dense statevector simulation for small qubit registers.

Qubit 0 is the most significant bit of the basis-state index, so the
"first m qubits" of a register are the m leading bits and ``|0^m i>`` is a
contiguous prefix of the amplitude array.

Rotations follow ``R_P(theta) = exp(-i theta P / 2)`` for ``P`` in
``{X, Y, Z(x)Z}``.

Besides the single-state API (:class:`StateVector`, :func:`run_circuit`) the
module exposes :func:`simulate`, which pushes a whole batch of states through
a circuit at once with per-sample feature angles. Training uses that path.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "GATE_KINDS",
    "Gate",
    "Circuit",
    "StateVector",
    "DensityMatrix",
    "zero_state",
    "apply_gate",
    "run_circuit",
    "simulate",
    "circuit_unitary",
    "partial_trace_first_m",
    "prob_zero_prefix",
    "overlap_pure",
    "hs_overlap",
]

GATE_KINDS = ("RX", "RY", "RZZ", "CNOT")
_MAX_UNITARY_QUBITS = 10
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Gate:
    """A single gate in a circuit.

    ``binding`` is ``None`` for a fixed angle, or ``("feature", k)`` /
    ``("weight", k)`` when the angle is read from slot ``k`` of the feature or
    weight vector. ``angle`` always holds the currently bound value.
    """

    kind: str
    qubits: Tuple[int, ...]
    angle: float = 0.0
    binding: Optional[Tuple[str, int]] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        n_expected = 1 if self.kind in ("RX", "RY") else 2
        if len(self.qubits) != n_expected:
            raise ValueError(f"{self.kind} acts on {n_expected} qubit(s), got {self.qubits}")
        if n_expected == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits, got {self.qubits}")
        if self.kind == "CNOT" and self.binding is not None:
            raise ValueError("CNOT has no angle to bind")
        if self.binding is not None and self.binding[0] not in ("feature", "weight"):
            raise ValueError(f"binding must be 'feature' or 'weight', got {self.binding[0]!r}")

    @property
    def is_feature(self) -> bool:
        return self.binding is not None and self.binding[0] == "feature"

    @property
    def is_weight(self) -> bool:
        return self.binding is not None and self.binding[0] == "weight"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: Tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits or min(g.qubits) < 0:
                raise IndexError(f"gate {g} out of range for {self.n_qubits} qubits")

    def __len__(self):
        return len(self.gates)

    def adjoint(self) -> "Circuit":
        """Reverse the gate order and negate every angle."""
        gates = tuple(replace(g, angle=-g.angle) for g in reversed(self.gates))
        return Circuit(self.n_qubits, gates)

    def compose(self, other: "Circuit") -> "Circuit":
        """Circuit that runs ``self`` first, then ``other``."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("register sizes differ")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def bind(self, features=None, weights=None) -> "Circuit":
        """Return a copy whose bound angles are read from ``features``/``weights``."""
        gates = []
        for g in self.gates:
            if g.is_feature and features is not None:
                g = replace(g, angle=float(features[g.binding[1]]))
            elif g.is_weight and weights is not None:
                g = replace(g, angle=float(weights[g.binding[1]]))
            gates.append(g)
        return Circuit(self.n_qubits, tuple(gates))

    def shifted(self, index: int, delta: float) -> "Circuit":
        """Copy with the angle of gate ``index`` moved by ``delta``; binding is dropped."""
        g = self.gates[index]
        if g.kind == "CNOT":
            raise ValueError("cannot shift a CNOT")
        gates = list(self.gates)
        gates[index] = replace(g, angle=g.angle + delta, binding=None)
        return Circuit(self.n_qubits, tuple(gates))

    def slot_occurrences(self, kind: str, slot: int) -> list:
        """Indices of the gates bound to ``(kind, slot)``."""
        return [i for i, g in enumerate(self.gates) if g.binding == (kind, slot)]


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** self.n_qubits:
            raise ValueError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_array(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.shape[0])))
        if 2 ** n != amps.shape[0]:
            raise ValueError("amplitude count must be a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        dim = 2 ** self.n_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def zero_state(n_qubits: int) -> StateVector:
    return StateVector.basis(n_qubits, 0)


# --- batched kernels ------------------------------------------------------
#
# ``psi`` has shape (B, 2, ..., 2); axis q+1 belongs to qubit q. ``angle`` is a
# scalar or a length-B array.


def _index(n: int, assign: dict) -> tuple:
    idx = [slice(None)] * (n + 1)
    for q, bit in assign.items():
        idx[q + 1] = bit
    return tuple(idx)


def _bcast(angle, psi: np.ndarray, dropped: int) -> np.ndarray:
    a = np.asarray(angle, dtype=float)
    if a.ndim == 0:
        return a
    return a.reshape((-1,) + (1,) * (psi.ndim - 1 - dropped))


def _apply_batched(psi: np.ndarray, kind: str, qubits: Sequence[int], angle) -> np.ndarray:
    n = psi.ndim - 1
    out = psi.copy()
    if kind == "CNOT":
        c, t = qubits
        out[_index(n, {c: 1, t: 0})] = psi[_index(n, {c: 1, t: 1})]
        out[_index(n, {c: 1, t: 1})] = psi[_index(n, {c: 1, t: 0})]
        return out
    if kind == "RZZ":
        a, b = qubits
        half = _bcast(angle, psi, 2) / 2.0
        even, odd = np.exp(-1j * half), np.exp(1j * half)
        for bits, phase in (((0, 0), even), ((1, 1), even), ((0, 1), odd), ((1, 0), odd)):
            sl = _index(n, {a: bits[0], b: bits[1]})
            out[sl] = psi[sl] * phase
        return out
    (q,) = qubits
    half = _bcast(angle, psi, 1) / 2.0
    c, s = np.cos(half), np.sin(half)
    i0, i1 = _index(n, {q: 0}), _index(n, {q: 1})
    a0, a1 = psi[i0], psi[i1]
    if kind == "RX":
        out[i0] = c * a0 - 1j * s * a1
        out[i1] = -1j * s * a0 + c * a1
    else:  # RY
        out[i0] = c * a0 - s * a1
        out[i1] = s * a0 + c * a1
    return out


def _resolve_angle(gate: Gate, features, weights):
    if gate.is_feature and features is not None:
        return features[:, gate.binding[1]]
    if gate.is_weight and weights is not None:
        return weights[gate.binding[1]]
    return gate.angle


def simulate(
    circuit: Circuit,
    features=None,
    weights=None,
    initial=None,
    adjoint: bool = False,
) -> np.ndarray:
    """Run a circuit on a batch of states.

    Parameters
    ----------
    circuit : Circuit
        Gates applied left to right.
    features : array_like, shape (B, d), optional
        Per-sample values for feature-bound gates. When omitted, the bound
        angles stored in the circuit are used.
    weights : array_like, optional
        Overrides weight-bound angles (shared across the batch).
    initial : array_like, shape (B, 2**n) or (2**n,), optional
        Starting states; defaults to ``|0...0>`` for every sample.
    adjoint : bool
        Apply the inverse circuit instead.

    Returns
    -------
    ndarray, shape (B, 2**n)
    """
    n = circuit.n_qubits
    dim = 2 ** n
    if features is not None:
        features = np.atleast_2d(np.asarray(features, dtype=float))
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
    if initial is None:
        batch = 1 if features is None else features.shape[0]
        psi = np.zeros((batch, dim), dtype=complex)
        psi[:, 0] = 1.0
    else:
        psi = np.atleast_2d(np.asarray(initial, dtype=complex))
        if psi.shape[1] != dim:
            raise ValueError(f"initial states have dimension {psi.shape[1]}, circuit needs {dim}")
        if features is not None and features.shape[0] not in (1, psi.shape[0]):
            raise ValueError("feature batch and state batch differ in size")
        if features is not None and psi.shape[0] == 1 and features.shape[0] > 1:
            psi = np.repeat(psi, features.shape[0], axis=0)
    psi = psi.reshape((psi.shape[0],) + (2,) * n)
    gates = reversed(circuit.gates) if adjoint else circuit.gates
    sign = -1.0 if adjoint else 1.0
    for g in gates:
        angle = _resolve_angle(g, features, weights)
        psi = _apply_batched(psi, g.kind, g.qubits, sign * np.asarray(angle, dtype=float))
    return psi.reshape(psi.shape[0], dim)


# --- single-state API -----------------------------------------------------


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    if max(gate.qubits) >= state.n_qubits:
        raise IndexError(f"gate {gate} out of range for {state.n_qubits} qubits")
    psi = state.amplitudes.reshape((1,) + (2,) * state.n_qubits)
    out = _apply_batched(psi, gate.kind, gate.qubits, gate.angle)
    return StateVector(state.n_qubits, out.reshape(-1))


def run_circuit(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    if initial is None:
        initial = zero_state(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits but the state has {initial.n_qubits}"
        )
    out = simulate(circuit, initial=initial.amplitudes)
    return StateVector(circuit.n_qubits, out[0])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit``; column ``j`` is the circuit applied to ``|j>``."""
    n = circuit.n_qubits
    if n > _MAX_UNITARY_QUBITS:
        raise ValueError(f"refusing to build a unitary on {n} > {_MAX_UNITARY_QUBITS} qubits")
    columns = simulate(circuit, initial=np.eye(2 ** n, dtype=complex))
    return columns.T


def _check_prefix(n: int, m: int):
    if not 1 <= m <= n:
        raise ValueError(f"prefix length m={m} must lie in [1, {n}]")


def partial_trace_first_m(state: StateVector, m: int) -> DensityMatrix:
    """Reduced state of the first ``m`` qubits (the last ``n - m`` are traced out)."""
    n = state.n_qubits
    _check_prefix(n, m)
    a = state.amplitudes.reshape(2 ** m, 2 ** (n - m))
    rho = a @ a.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(m, rho)


def prob_zero_prefix(state: StateVector, m: int) -> float:
    """Probability that the first ``m`` qubits all read 0."""
    _check_prefix(state.n_qubits, m)
    block = state.amplitudes[: 2 ** (state.n_qubits - m)]
    return float(np.sum(np.abs(block) ** 2))


def overlap_pure(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError("states live on registers of different size")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def hs_overlap(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``Re Tr[rho sigma]`` clamped to [0, 1]."""
    if rho.n_qubits != sigma.n_qubits:
        raise ValueError("density matrices differ in dimension")
    # Tr[rho sigma] = sum_ij rho_ij sigma_ji
    value = float(np.sum(rho.entries * sigma.entries.T).real)
    return min(1.0, max(0.0, value))
