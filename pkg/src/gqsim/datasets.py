"""Seeded synthetic datasets.

Raw values live in ``[0, 1]`` (or in plain coordinates for blobs and moons)
and are turned into rotation angles by multiplying with ``scale``. Each
generator applies the scale once and records it in ``metadata["scale"]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .training import PairDataset

__all__ = [
    "LEFT",
    "RIGHT",
    "LabeledPoints",
    "GraphProblem",
    "gen_half_images",
    "gen_clusters",
    "gen_moons",
    "gen_delta_images",
    "truncated_normal",
    "build_pairs",
    "gen_graph_problem",
    "minmax_unit",
]

LEFT, RIGHT = 0, 1
# row-major 2x2 image: pixels 0,2 form the left column, 1,3 the right column
_LEFT_COLUMN = np.array([0, 2])
_RIGHT_COLUMN = np.array([1, 3])


@dataclass
class LabeledPoints:
    points: np.ndarray
    labels: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels differ in length")
        self.metadata.setdefault("scale", 1.0)

    def __len__(self):
        return len(self.labels)

    @property
    def raw(self) -> np.ndarray:
        """Points with the angle scaling undone."""
        return self.points / self.metadata["scale"]

    def of_class(self, label: int) -> np.ndarray:
        return self.points[self.labels == label]

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "labels": self.labels.tolist(),
                "metadata": self.metadata}

    @classmethod
    def from_dict(cls, data) -> "LabeledPoints":
        return cls(data["points"], data["labels"], dict(data.get("metadata", {})))


@dataclass
class GraphProblem:
    attributes: LabeledPoints
    adjacency: np.ndarray
    observed_mask: np.ndarray

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=int)
        self.observed_mask = np.asarray(self.observed_mask, dtype=bool)
        a, mask = self.adjacency, self.observed_mask
        if not np.array_equal(a, a.T) or np.any(np.diag(a)):
            raise ValueError("adjacency must be symmetric with a zero diagonal")
        if not np.array_equal(mask, mask.T) or np.any(np.diag(mask)):
            raise ValueError("observation mask must be symmetric and exclude the diagonal")

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    def observed_pairs(self) -> np.ndarray:
        """Upper-triangle ``(i, j)`` pairs whose edge label is observed."""
        i, j = np.nonzero(np.triu(self.observed_mask, 1))
        return np.stack([i, j], axis=1)

    def hidden_pairs(self) -> np.ndarray:
        off = ~np.eye(self.n_nodes, dtype=bool)
        i, j = np.nonzero(np.triu(off & ~self.observed_mask, 1))
        return np.stack([i, j], axis=1)

    def observed_view(self) -> np.ndarray:
        """Adjacency with hidden entries set to -1."""
        view = np.where(self.observed_mask, self.adjacency, -1)
        np.fill_diagonal(view, 0)
        return view

    def to_dict(self) -> dict:
        return {"attributes": self.attributes.to_dict(), "adjacency": self.adjacency.tolist(),
                "observed_mask": self.observed_mask.astype(int).tolist()}

    @classmethod
    def from_dict(cls, data) -> "GraphProblem":
        return cls(LabeledPoints.from_dict(data["attributes"]), data["adjacency"],
                   np.asarray(data["observed_mask"], dtype=bool))


def gen_half_images(n: int, rng: np.random.Generator, scale: float = np.pi) -> LabeledPoints:
    """``n/2`` "left" and ``n/2`` "right" 2x2 images.

    A left image keeps its left column (uniform pixels in [0, 1]) and has the
    right column zeroed; a right image is the mirror case. Labels are
    :data:`LEFT` then :data:`RIGHT`.
    """
    if n % 2:
        raise ValueError("n must be even")
    half = n // 2
    pixels = rng.uniform(0.0, 1.0, (n, 4))
    pixels[:half, _RIGHT_COLUMN] = 0.0
    pixels[half:, _LEFT_COLUMN] = 0.0
    labels = np.repeat([LEFT, RIGHT], half)
    return LabeledPoints(pixels * scale, labels,
                         {"scale": scale, "kind": "half_images", "classes": ["left", "right"]})


def gen_clusters(n: int, k: int, dim: int, centers, spread, rng: np.random.Generator,
                 scale: float = 1.0) -> LabeledPoints:
    """Isotropic Gaussian blobs, ``n/k`` points per center.

    ``spread`` is a scalar or one standard deviation per cluster.
    """
    if k < 1 or dim < 1 or n < k or n % k:
        raise ValueError("need k >= 1, dim >= 1 and n divisible by k")
    centers = np.asarray(centers, dtype=float).reshape(k, dim)
    spread = np.broadcast_to(np.asarray(spread, dtype=float), (k,))
    if np.any(spread < 0):
        raise ValueError("spread must be non-negative")
    per = n // k
    labels = np.repeat(np.arange(k), per)
    points = centers[labels] + spread[labels, None] * rng.standard_normal((n, dim))
    return LabeledPoints(points * scale, labels,
                         {"scale": scale, "kind": "clusters", "centers": centers.tolist(),
                          "spread": spread.tolist()})


def gen_moons(n: int, noise: float, rng: np.random.Generator, scale: float = 1.0) -> LabeledPoints:
    """Two interleaved half circles of unit radius plus Gaussian noise.

    Class 0 lies on the upper arc around (0, 0), class 1 on the lower arc
    around (1, 0.5).
    """
    if n < 2 or n % 2 or noise < 0:
        raise ValueError("need an even n >= 2 and noise >= 0")
    half = n // 2
    t0 = rng.uniform(0.0, np.pi, half)
    t1 = rng.uniform(0.0, np.pi, half)
    outer = np.stack([np.cos(t0), np.sin(t0)], axis=1)
    inner = np.stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)], axis=1)
    points = np.vstack([outer, inner]) + noise * rng.standard_normal((n, 2))
    labels = np.repeat([0, 1], half)
    return LabeledPoints(points * scale, labels, {"scale": scale, "kind": "moons", "noise": noise})


def truncated_normal(mean: float, sd: float, size: int, rng: np.random.Generator,
                     low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Normal(mean, sd) restricted to ``[low, high]`` by rejection."""
    if sd == 0:
        return np.full(size, float(np.clip(mean, low, high)))
    out = np.empty(0)
    while out.size < size:
        draw = rng.normal(mean, sd, 2 * (size - out.size) + 8)
        out = np.concatenate([out, draw[(draw >= low) & (draw <= high)]])
    return out[:size]


def gen_delta_images(delta: float, n: int, rng: np.random.Generator, eps: float = 0.1,
                     scale: float = np.pi) -> np.ndarray:
    """Images ``[[X, 1-X], [X, 1-X]]`` with ``X`` ~ Normal(delta, eps^2) truncated to [0, 1].

    Rows are flattened row-major and multiplied by ``scale``. At ``delta = 0``
    the right column is lit, which is a "right" image under
    :func:`gen_half_images`; ``delta = 1`` gives a "left" image.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x = truncated_normal(delta, eps, n, rng)
    pixels = np.stack([x, 1.0 - x, x, 1.0 - x], axis=1)
    return pixels * scale


def build_pairs(X: LabeledPoints, Xt: LabeledPoints, association: dict) -> PairDataset:
    """Cross product of two labeled sets; ``y = 1`` iff ``association[label(x)] == label(x~)``."""
    missing = set(np.unique(X.labels).tolist()) - set(association)
    if missing:
        raise ValueError(f"association does not cover classes {sorted(missing)}")
    target = np.array([association[c] for c in X.labels])
    y = (target[:, None] == Xt.labels[None, :]).astype(int)
    nx, nt = len(X), len(Xt)
    return PairDataset(
        np.repeat(X.points, nt, axis=0),
        np.tile(Xt.points, (nx, 1)),
        y.reshape(-1),
        {"scale_x": X.metadata["scale"], "scale_xt": Xt.metadata["scale"],
         "association": {str(k): int(v) for k, v in association.items()}},
    )


def minmax_unit(points: np.ndarray) -> np.ndarray:
    """Affine map of each coordinate onto [0, 1]."""
    lo, hi = points.min(axis=0), points.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (points - lo) / span


def gen_graph_problem(n_nodes: int, k: int, dim: int, observed_fraction: float,
                      rng: np.random.Generator, spread_range=(0.5, 1.5),
                      center_radius: float = 6.0, scale: float = np.pi,
                      centers: Optional[np.ndarray] = None) -> GraphProblem:
    """Attributed graph whose edges join nodes drawn from the same cluster.

    Cluster spreads are uniform in ``spread_range``. Centers default to
    equally spaced points on a circle of radius ``center_radius``. Attributes
    are mapped into the unit cube, then scaled to angles. Each off-diagonal
    node pair is observed independently with probability
    ``observed_fraction``.
    """
    if not 0.0 < observed_fraction <= 1.0:
        raise ValueError("observed_fraction must lie in (0, 1]")
    if n_nodes < 2 or k < 1:
        raise ValueError("need at least two nodes and one cluster")
    lo, hi = spread_range
    if not 0 <= lo <= hi:
        raise ValueError("invalid spread range")
    if centers is None:
        if dim == 1:
            centers = np.linspace(-center_radius, center_radius, k).reshape(k, 1)
        else:
            ang = 2 * np.pi * np.arange(k) / k + np.pi / 4
            centers = np.zeros((k, dim))
            centers[:, 0] = center_radius * np.cos(ang)
            centers[:, 1] = center_radius * np.sin(ang)
    centers = np.asarray(centers, dtype=float).reshape(k, dim)
    spreads = rng.uniform(lo, hi, k)
    labels = np.sort(np.arange(n_nodes) % k)
    raw = centers[labels] + spreads[labels, None] * rng.standard_normal((n_nodes, dim))
    unit = minmax_unit(raw)
    attributes = LabeledPoints(unit * scale, labels,
                               {"scale": scale, "kind": "graph_attributes",
                                "spreads": spreads.tolist()})
    adjacency = (labels[:, None] == labels[None, :]).astype(int)
    np.fill_diagonal(adjacency, 0)
    upper = np.triu(rng.uniform(size=(n_nodes, n_nodes)) < observed_fraction, 1)
    mask = upper | upper.T
    return GraphProblem(attributes, adjacency, mask)
