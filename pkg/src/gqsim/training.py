"""Squared-error training of similarity models with stochastic batches."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from ._random import rng_stream
from .cobyla import minimize_cobyla
from .similarity import (
    MeasureSpec,
    SimilarityModel,
    circuit_similarity,
    pair_similarity,
    similarity_batch,
    similarity_matrix,
)
from .statevector import Circuit

__all__ = [
    "PairDataset",
    "TrainConfig",
    "TrainResult",
    "loss",
    "pair_similarities",
    "stochastic_batch",
    "cobyla_minimize",
    "train",
    "feature_gradient",
    "circuit_feature_gradient",
]

log = logging.getLogger(__name__)

_SHIFT = np.pi / 2
_SHIFTABLE = ("RX", "RY", "RZZ")


@dataclass
class PairDataset:
    """Labeled pairs ``(x, x~, y)``; ``y = 1`` marks a similar pair."""

    X: np.ndarray
    Xt: np.ndarray
    y: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.Xt = np.atleast_2d(np.asarray(self.Xt, dtype=float))
        self.y = np.asarray(self.y, dtype=int).reshape(-1)
        if not (len(self.X) == len(self.Xt) == len(self.y)):
            raise ValueError("X, Xt and y must have the same length")
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    @classmethod
    def from_pairs(cls, pairs, metadata=None) -> "PairDataset":
        pairs = list(pairs)
        X = [np.ravel(p[0]) for p in pairs]
        Xt = [np.ravel(p[1]) for p in pairs]
        return cls(X, Xt, [p[2] for p in pairs], metadata or {})

    def __len__(self):
        return len(self.y)

    @property
    def similar_idx(self) -> np.ndarray:
        return np.flatnonzero(self.y == 1)

    @property
    def dissimilar_idx(self) -> np.ndarray:
        return np.flatnonzero(self.y == 0)

    def unique_points(self):
        """Distinct rows of ``X`` and ``Xt`` with inverse indices (cached)."""
        if getattr(self, "_unique", None) is None:
            ux, ix = np.unique(self.X, axis=0, return_inverse=True)
            ut, it = np.unique(self.Xt, axis=0, return_inverse=True)
            self._unique = (ux, ix.ravel(), ut, it.ravel())
        return self._unique

    def subset(self, idx) -> "PairDataset":
        idx = np.asarray(idx, dtype=int)
        return PairDataset(self.X[idx], self.Xt[idx], self.y[idx], dict(self.metadata))

    def to_dict(self) -> dict:
        return {"X": self.X.tolist(), "Xt": self.Xt.tolist(), "y": self.y.tolist(),
                "metadata": self.metadata}

    @classmethod
    def from_dict(cls, data) -> "PairDataset":
        return cls(data["X"], data["Xt"], data["y"], data.get("metadata", {}))


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 80
    max_evals: int = 1500
    seed: int = 0
    optimizer: str = "cobyla"
    rho_begin: float = 1.0
    rho_end: float = 1e-3
    initial_weights: str = "uniform"
    resample: str = "auto"

    def __post_init__(self):
        if self.batch_size < 2 or self.batch_size % 2:
            raise ValueError("batch_size must be even and >= 2")
        if not self.rho_begin > self.rho_end > 0:
            raise ValueError("need rho_begin > rho_end > 0")
        if self.optimizer not in ("cobyla", "nelder-mead"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.initial_weights not in ("uniform", "zeros", "model"):
            raise ValueError(f"unknown initial_weights {self.initial_weights!r}")
        if self.resample not in ("auto", "none", "reduce", "fail"):
            raise ValueError(f"unknown resample mode {self.resample!r}")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")


@dataclass
class TrainResult:
    weights: np.ndarray
    loss_history: list
    final_full_loss: float
    initial_full_loss: float = float("nan")
    n_evals: int = 0
    model: Optional[SimilarityModel] = None
    message: str = ""

    @property
    def best_history(self) -> np.ndarray:
        """Running minimum of the recorded losses."""
        return np.minimum.accumulate([v for _, v in self.loss_history])

    @property
    def min_loss(self) -> float:
        return float(min(v for _, v in self.loss_history))


def loss(model: SimilarityModel, measure: MeasureSpec, subset: PairDataset) -> float:
    """Mean of ``(S(x, x~) - y)^2`` over the pairs in ``subset``."""
    if len(subset) == 0:
        raise ValueError("cannot evaluate the loss on an empty set of pairs")
    return float(np.mean((pair_similarities(model, measure, subset) - subset.y) ** 2))


def pair_similarities(model: SimilarityModel, measure: MeasureSpec, pairs: PairDataset) -> np.ndarray:
    """Similarity of every pair; reuses embedded states when points repeat."""
    if measure.kind != "proj" and len(pairs) > 64:
        ux, ix, ut, it = pairs.unique_points()
        if len(ux) + len(ut) < len(pairs):
            return similarity_matrix(model, measure, ux, ut)[ix, it]
    return similarity_batch(model, measure, pairs.X, pairs.Xt)


def stochastic_batch(dataset: PairDataset, size: int, rng: np.random.Generator) -> PairDataset:
    """Draw ``size/2`` similar and ``size/2`` dissimilar pairs.

    A batch at least as large as the dataset is the dataset itself. A class
    with fewer than ``size/2`` pairs is sampled with replacement, and an empty
    class hands its share to the other one.
    """
    if size >= len(dataset):
        return dataset
    half = size // 2
    sim, dis = dataset.similar_idx, dataset.dissimilar_idx
    if len(sim) == 0 or len(dis) == 0:
        pool = sim if len(sim) else dis
        return dataset.subset(rng.choice(pool, size, replace=len(pool) < size))
    parts = []
    for pool in (sim, dis):
        replace = len(pool) < half
        parts.append(rng.choice(pool, half, replace=replace))
    return dataset.subset(np.concatenate(parts))


def _warn_degenerate(dataset: PairDataset, size: int):
    if size >= len(dataset):
        return
    n_sim, n_dis = len(dataset.similar_idx), len(dataset.dissimilar_idx)
    if n_sim == 0 or n_dis == 0:
        log.warning("one pair class is empty; batches come from the other class only")
    elif min(n_sim, n_dis) < size // 2:
        log.warning("a pair class has %d pairs, fewer than half a batch; sampling with "
                    "replacement", min(n_sim, n_dis))


def cobyla_minimize(objective, x0, config: TrainConfig, noisy: bool = True) -> TrainResult:
    """Minimize ``objective`` from ``x0`` with the optimizer named in ``config``.

    With ``resample="auto"`` a ``noisy`` objective re-evaluates the best
    vertex after every failed step; a deterministic one never resamples.

    ``final_full_loss`` is the best value the optimizer saw; :func:`train`
    replaces it by an exact full-dataset evaluation.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise FloatingPointError(f"objective is not finite at the starting point ({f0})")
    if config.optimizer == "cobyla":
        # the probe above is not charged to the optimizer budget
        resample = config.resample
        if resample == "auto":
            resample = "fail" if noisy else "none"
        res = minimize_cobyla(objective, x0, config.rho_begin, config.rho_end, config.max_evals,
                              resample=resample)
        return TrainResult(res.x, res.history, res.fun, f0, res.n_evals, message=res.message)

    history = []
    best = {"x": x0.copy(), "f": np.inf}

    def tracked(x):
        f = float(objective(x))
        if not np.isfinite(f):
            raise FloatingPointError(f"objective returned {f} at evaluation {len(history)}")
        history.append((len(history), f))
        if f < best["f"]:
            best["x"], best["f"] = np.array(x, dtype=float), f
        return f

    simplex = np.vstack([x0, x0 + config.rho_begin * np.eye(x0.size)])
    res = _scipy_minimize(tracked, x0, method="Nelder-Mead",
                          options={"maxfev": config.max_evals, "initial_simplex": simplex,
                                   "xatol": config.rho_end, "fatol": 0.0})
    return TrainResult(best["x"], history, best["f"], f0, len(history), message=res.message)


def _initial_weights(model: SimilarityModel, config: TrainConfig) -> np.ndarray:
    if config.initial_weights == "model":
        return model.flat_weights()
    if config.initial_weights == "zeros":
        return np.zeros(model.n_params)
    return rng_stream(config.seed, "init").uniform(-np.pi, np.pi, model.n_params)


def train(model: SimilarityModel, measure: MeasureSpec, dataset: PairDataset,
          config: TrainConfig) -> TrainResult:
    """Fit the model weights to the dataset labels.

    Every objective evaluation draws a fresh balanced batch from a stream
    derived from ``config.seed``. With shared weights only ``theta`` is
    optimized, otherwise ``theta`` and ``eta`` are optimized jointly as one
    vector.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    measure.prefix(model.n_qubits)
    _warn_degenerate(dataset, config.batch_size)
    batch_rng = rng_stream(config.seed, "batch")

    def objective(w):
        batch = stochastic_batch(dataset, config.batch_size, batch_rng)
        return loss(model.with_weights(w), measure, batch)

    w0 = _initial_weights(model, config)
    result = cobyla_minimize(objective, w0, config, noisy=config.batch_size < len(dataset))
    fitted = model.with_weights(result.weights)
    result.model = fitted
    result.initial_full_loss = loss(model.with_weights(w0), measure, dataset)
    result.final_full_loss = loss(fitted, measure, dataset)
    return result


def _shift_gradient(circuit: Circuit, slot: int, value_fn) -> float:
    total = 0.0
    for i in circuit.slot_occurrences("feature", slot):
        kind = circuit.gates[i].kind
        if kind not in _SHIFTABLE:
            raise ValueError(f"feature slot {slot} enters a {kind} gate; no shift rule")
        total += (value_fn(circuit.shifted(i, _SHIFT)) - value_fn(circuit.shifted(i, -_SHIFT))) / 2
    return total


def feature_gradient(model: SimilarityModel, measure: MeasureSpec, x, xt, wrt: str = "xt") -> np.ndarray:
    """Parameter-shift gradient of ``S(x, x~)`` with respect to ``x~`` (or ``x``).

    Each feature slot may occur in several gates; the contributions of the
    individual occurrences are summed.
    """
    u, v = model.circuits(x, xt)
    if wrt == "xt":
        dim = model.spec_xt.feature_dim
        return np.array([_shift_gradient(v, k, lambda vv: circuit_similarity(u, vv, measure))
                         for k in range(dim)])
    if wrt == "x":
        dim = model.spec_x.feature_dim
        return np.array([_shift_gradient(u, k, lambda uu: circuit_similarity(uu, v, measure))
                         for k in range(dim)])
    raise ValueError("wrt must be 'x' or 'xt'")


def circuit_feature_gradient(circuit: Circuit, measure: MeasureSpec) -> np.ndarray:
    """Shift-rule gradient of :func:`pair_similarity` over the circuit's feature slots."""
    slots = sorted({g.binding[1] for g in circuit.gates if g.is_feature})
    grad = np.zeros(max(slots) + 1 if slots else 0)
    for k in slots:
        grad[k] = _shift_gradient(circuit, k, lambda c: pair_similarity(c, measure))
    return grad
