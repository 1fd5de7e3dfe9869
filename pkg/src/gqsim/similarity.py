"""Similarity functionals between two embedded data points.

Three measures are supported, all evaluated exactly from statevectors:

``full``
    ``|<0| U(x)^dag V(x~) |0>|^2``, the fidelity of the two embedded states.
``swap:m``
    Hilbert-Schmidt overlap ``Tr[rho_m sigma_m]`` of the reduced states of
    the first ``m`` qubits of ``U(x)|0>`` and ``V(x~)|0>``.
``proj:m``
    Probability that the first ``m`` qubits of ``U(x)^dag V(x~)|0>`` read 0.
    Not symmetric in its arguments in general.

With ``m = n`` the three coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .embeddings import EmbeddingSpec, embedding_template, weight_count
from .statevector import Circuit, simulate

__all__ = [
    "MeasureSpec",
    "SimilarityModel",
    "similarity",
    "similarity_batch",
    "similarity_matrix",
    "circuit_similarity",
    "pair_similarity",
    "pair_similarity_batch",
    "distance",
    "zeta",
    "subspace_dims",
    "toy_s2_closed",
    "toy_s1_closed",
]

_KINDS = ("full", "swap", "proj")


@dataclass(frozen=True)
class MeasureSpec:
    kind: str = "full"
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"measure kind must be one of {_KINDS}, got {self.kind!r}")
        if self.kind == "full":
            if self.m is not None:
                raise ValueError("the full-overlap measure takes no prefix length")
        elif self.m is None or int(self.m) < 1:
            raise ValueError(f"{self.kind} needs a prefix length m >= 1")

    @classmethod
    def parse(cls, text: str) -> "MeasureSpec":
        """Parse ``full``, ``swap:m`` or ``proj:m``."""
        text = text.strip().lower()
        if text == "full":
            return cls("full")
        kind, _, m = text.partition(":")
        if kind not in ("swap", "proj") or not m.isdigit():
            raise ValueError(f"cannot parse measure {text!r}; use full, swap:m or proj:m")
        return cls(kind, int(m))

    def __str__(self):
        return "full" if self.kind == "full" else f"{self.kind}:{self.m}"

    def prefix(self, n_qubits: int) -> int:
        m = n_qubits if self.kind == "full" else int(self.m)
        if not 1 <= m <= n_qubits:
            raise ValueError(f"prefix m={m} out of range for {n_qubits} qubits")
        return m


class SimilarityModel:
    """Pair of embedding circuits ``U_theta`` (for x) and ``V_eta`` (for x~).

    With ``shared_weights=True`` there is a single weight vector and ``eta``
    is the same array as ``theta``.
    """

    def __init__(self, spec_x: EmbeddingSpec, spec_xt: EmbeddingSpec, theta, eta=None,
                 shared_weights: bool = False):
        if spec_x.n_qubits != spec_xt.n_qubits:
            raise ValueError("both embeddings must act on the same register size")
        theta = np.array(theta, dtype=float).reshape(-1)
        if theta.shape[0] != weight_count(spec_x):
            raise ValueError(f"theta has {theta.shape[0]} entries, need {weight_count(spec_x)}")
        if shared_weights:
            if weight_count(spec_xt) != weight_count(spec_x):
                raise ValueError("shared weights need embeddings with equal weight counts")
            if eta is not None and not np.array_equal(np.asarray(eta, dtype=float), theta):
                raise ValueError("shared_weights=True but eta differs from theta")
            eta = theta
        else:
            if eta is None:
                raise ValueError("eta is required unless shared_weights=True")
            eta = np.array(eta, dtype=float).reshape(-1)
            if eta.shape[0] != weight_count(spec_xt):
                raise ValueError(f"eta has {eta.shape[0]} entries, need {weight_count(spec_xt)}")
        theta.setflags(write=False)
        if eta is not theta:
            eta.setflags(write=False)
        self.spec_x = spec_x
        self.spec_xt = spec_xt
        self.theta = theta
        self.eta = eta
        self.shared_weights = bool(shared_weights)

    @property
    def n_qubits(self) -> int:
        return self.spec_x.n_qubits

    @property
    def n_params(self) -> int:
        return self.theta.size if self.shared_weights else self.theta.size + self.eta.size

    def flat_weights(self) -> np.ndarray:
        if self.shared_weights:
            return self.theta.copy()
        return np.concatenate([self.theta, self.eta])

    def with_weights(self, flat) -> "SimilarityModel":
        """Same architecture, weights taken from a flat vector (see :meth:`flat_weights`)."""
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != self.n_params:
            raise ValueError(f"expected {self.n_params} weights, got {flat.size}")
        if self.shared_weights:
            return SimilarityModel(self.spec_x, self.spec_xt, flat, shared_weights=True)
        k = self.theta.size
        return SimilarityModel(self.spec_x, self.spec_xt, flat[:k], flat[k:])

    @classmethod
    def random(cls, spec_x, spec_xt, rng, shared_weights=False) -> "SimilarityModel":
        theta = rng.uniform(-np.pi, np.pi, weight_count(spec_x))
        eta = None if shared_weights else rng.uniform(-np.pi, np.pi, weight_count(spec_xt))
        return cls(spec_x, spec_xt, theta, eta, shared_weights=shared_weights)

    def circuits(self, x, xt):
        """Bound circuits ``(U_theta(x), V_eta(x~))``."""
        u = embedding_template(self.spec_x).bind(np.asarray(x, float).reshape(-1), self.theta)
        v = embedding_template(self.spec_xt).bind(np.asarray(xt, float).reshape(-1), self.eta)
        return u, v

    def states_x(self, X) -> np.ndarray:
        return simulate(embedding_template(self.spec_x), _as_batch(X, self.spec_x), self.theta)

    def states_xt(self, Xt) -> np.ndarray:
        return simulate(embedding_template(self.spec_xt), _as_batch(Xt, self.spec_xt), self.eta)

    def to_dict(self) -> dict:
        return {
            "spec_x": vars(self.spec_x).copy(),
            "spec_xt": vars(self.spec_xt).copy(),
            "theta": self.theta.tolist(),
            "eta": None if self.shared_weights else self.eta.tolist(),
            "shared_weights": self.shared_weights,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimilarityModel":
        return cls(EmbeddingSpec(**data["spec_x"]), EmbeddingSpec(**data["spec_xt"]),
                   data["theta"], data.get("eta"), shared_weights=data["shared_weights"])


def _as_batch(X, spec: EmbeddingSpec) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != spec.feature_dim:
        raise ValueError(f"expected {spec.feature_dim} features per point, got {X.shape[1]}")
    return X


def _clip(values):
    return np.clip(values, 0.0, 1.0)


def _measure_states(psi_x, psi_t, n, measure: MeasureSpec, phi=None):
    """Evaluate a measure from the two embedded states (row-aligned batches)."""
    m = measure.prefix(n)
    if measure.kind == "full" or (measure.kind == "swap" and m == n):
        return np.abs(np.einsum("bi,bi->b", psi_x.conj(), psi_t)) ** 2
    if measure.kind == "swap":
        a = psi_x.reshape(-1, 2 ** m, 2 ** (n - m))
        b = psi_t.reshape(-1, 2 ** m, 2 ** (n - m))
        # Tr[A A^dag B B^dag] = ||A^dag B||_F^2
        cross = np.einsum("bik,bil->bkl", a.conj(), b)
        return np.sum(np.abs(cross) ** 2, axis=(1, 2))
    return np.sum(np.abs(phi[:, : 2 ** (n - m)]) ** 2, axis=1)


def similarity_batch(model: SimilarityModel, measure: MeasureSpec, X, Xt) -> np.ndarray:
    """Similarity of row-aligned pairs ``(X[i], Xt[i])``."""
    X = _as_batch(X, model.spec_x)
    Xt = _as_batch(Xt, model.spec_xt)
    if X.shape[0] != Xt.shape[0]:
        raise ValueError("X and Xt must hold the same number of points")
    psi_t = model.states_xt(Xt)
    phi = psi_x = None
    if measure.kind == "proj":
        phi = simulate(embedding_template(model.spec_x), X, model.theta, initial=psi_t,
                       adjoint=True)
    else:
        psi_x = model.states_x(X)
    return _clip(_measure_states(psi_x, psi_t, model.n_qubits, measure, phi))


def similarity_matrix(model: SimilarityModel, measure: MeasureSpec, X, Xt) -> np.ndarray:
    """All-pairs similarities, shape ``(len(X), len(Xt))``."""
    X = _as_batch(X, model.spec_x)
    Xt = _as_batch(Xt, model.spec_xt)
    n = model.n_qubits
    m = measure.prefix(n)
    if measure.kind == "proj":
        psi_t = model.states_xt(Xt)
        nx, nt = X.shape[0], Xt.shape[0]
        feats = np.repeat(X, nt, axis=0)
        init = np.tile(psi_t, (nx, 1))
        phi = simulate(embedding_template(model.spec_x), feats, model.theta, initial=init,
                       adjoint=True)
        vals = np.sum(np.abs(phi[:, : 2 ** (n - m)]) ** 2, axis=1)
        return _clip(vals.reshape(nx, nt))
    psi_x = model.states_x(X)
    psi_t = model.states_xt(Xt)
    if measure.kind == "full" or m == n:
        return _clip(np.abs(psi_x.conj() @ psi_t.T) ** 2)
    a = psi_x.reshape(-1, 2 ** m, 2 ** (n - m))
    b = psi_t.reshape(-1, 2 ** m, 2 ** (n - m))
    cross = np.einsum("pik,qil->pqkl", a.conj(), b)
    return _clip(np.sum(np.abs(cross) ** 2, axis=(2, 3)))


def similarity(model: SimilarityModel, measure: MeasureSpec, x, xt) -> float:
    return float(similarity_batch(model, measure, [np.ravel(x)], [np.ravel(xt)])[0])


def circuit_similarity(u: Circuit, v: Circuit, measure: MeasureSpec) -> float:
    """Measure evaluated directly from two bound circuits ``U`` and ``V``."""
    if u.n_qubits != v.n_qubits:
        raise ValueError("circuits act on different register sizes")
    n = u.n_qubits
    psi_t = simulate(v)
    if measure.kind == "proj":
        phi = simulate(u, initial=psi_t, adjoint=True)
        val = _measure_states(None, psi_t, n, measure, phi)
    else:
        val = _measure_states(simulate(u), psi_t, n, measure)
    return float(_clip(val[0]))


def pair_similarity(circuit: Circuit, measure: MeasureSpec) -> float:
    """Measure for a single pair-embedding circuit, ``U~(x, x~)|0>``.

    Only the projective measures make sense here (``full`` or ``proj:m``).
    """
    if measure.kind == "swap":
        raise ValueError("a pair embedding has one register; use full or proj:m")
    m = measure.prefix(circuit.n_qubits)
    phi = simulate(circuit)[0]
    return float(_clip(np.sum(np.abs(phi[: 2 ** (circuit.n_qubits - m)]) ** 2)))


def pair_similarity_batch(circuit: Circuit, measure: MeasureSpec, features) -> np.ndarray:
    """:func:`pair_similarity` for a batch of feature rows bound into ``circuit``."""
    if measure.kind == "swap":
        raise ValueError("a pair embedding has one register; use full or proj:m")
    n = circuit.n_qubits
    m = measure.prefix(n)
    phi = simulate(circuit, np.atleast_2d(np.asarray(features, dtype=float)))
    return _clip(np.sum(np.abs(phi[:, : 2 ** (n - m)]) ** 2, axis=1))


def distance(model: SimilarityModel, measure: MeasureSpec, x, xt) -> float:
    """``sqrt(2 - 2 S)``, the Hilbert-Schmidt distance between pure embeddings."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * similarity(model, measure, x, xt))))


def zeta(n: int, m: int) -> Fraction:
    """Ratio of the similar-pair to dissimilar-pair target subspace dimensions."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return Fraction(1, 2 ** m - 1)


def subspace_dims(n: int, m: int) -> tuple:
    """``(d_E, d_D)``: dimensions of the states scoring 1 and 0 under ``proj:m``."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return 2 ** (n - m), 2 ** n - 2 ** (n - m)


def toy_s2_closed(x, xt):
    return np.cos(np.asarray(x) / 2) ** 2 * np.cos(np.asarray(xt) / 2) ** 2


def toy_s1_closed(x, xt):
    x, xt = np.asarray(x), np.asarray(xt)
    return (np.cos(x - xt) + np.cos(x + xt)) / 4 + 0.5
