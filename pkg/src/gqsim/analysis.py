"""Tools for studying similarity functions.

Grid scans over the torus (density of states, retrieval loss, improvement
map), the 1-D Wasserstein distance, and an empirical goodness check with a
landmark map and a linear separator.

Grid scans sample ``grid_n`` points per axis at ``2 pi k / grid_n`` for
``k = 1..grid_n``, so the angle interval is ``(0, 2 pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import wasserstein_distance

from .similarity import toy_s1_closed, toy_s2_closed

__all__ = [
    "Histogram",
    "GoodnessReport",
    "angle_grid",
    "density_of_states",
    "total_variation",
    "retrieval_loss",
    "retrieval_curve",
    "retrieval_optimum",
    "lambda_improvement",
    "lambda_map",
    "wasserstein_1d",
    "goodness_estimate",
    "landmark_count",
    "landmark_map",
    "linear_separator_check",
]


@dataclass
class Histogram:
    bin_edges: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=float)
        self.densities = np.asarray(self.densities, dtype=float)
        if self.bin_edges.size != self.densities.size + 1:
            raise ValueError("need one more edge than densities")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin edges must increase")
        if np.any(self.densities < 0):
            raise ValueError("densities must be non-negative")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def mass(self) -> np.ndarray:
        """Probability in each bin."""
        return self.densities * self.widths

    @property
    def mode_bin(self) -> int:
        return int(np.argmax(self.densities))


@dataclass
class GoodnessReport:
    gamma: float
    epsilon_hat: float
    tau: float
    margin_violations: int
    n_points: int
    margins: np.ndarray

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "epsilon_hat": self.epsilon_hat, "tau": self.tau,
                "margin_violations": self.margin_violations, "n_points": self.n_points,
                "mean_margin": float(np.mean(self.margins))}


def angle_grid(grid_n: int) -> np.ndarray:
    """``grid_n`` equally spaced angles in ``(0, 2 pi]``."""
    if grid_n < 1:
        raise ValueError("grid_n must be positive")
    return 2 * np.pi * np.arange(1, grid_n + 1) / grid_n


def density_of_states(s_fn, grid_n: int = 200, n_bins: int = 50) -> Histogram:
    """Normalized histogram of ``s_fn(x, x~)`` over the grid on the torus.

    ``s_fn`` must accept broadcast arrays of angles.
    """
    if grid_n < 10:
        raise ValueError("grid_n must be at least 10")
    if n_bins < 1:
        raise ValueError("need at least one bin")
    g = angle_grid(grid_n)
    values = np.broadcast_to(s_fn(g[:, None], g[None, :]), (grid_n, grid_n))
    values = np.clip(values, 0.0, 1.0).ravel()
    dens, edges = np.histogram(values, bins=n_bins, range=(0.0, 1.0), density=True)
    return Histogram(edges, dens)


def total_variation(p: Histogram, q: Histogram) -> float:
    """Total-variation distance between two histograms on the same bins."""
    if not np.allclose(p.bin_edges, q.bin_edges):
        raise ValueError("histograms use different bins")
    return 0.5 * float(np.sum(np.abs(p.mass - q.mass)))


def retrieval_loss(s_fn, xt, x_s, x_d):
    """``0.5 * sqrt((1 - S(x_s, x~))^2 + S(x_d, x~)^2)``.

    Small when ``x~`` is similar to ``x_s`` and dissimilar to ``x_d``.
    Broadcasts over ``xt``.
    """
    a = 1.0 - s_fn(x_s, xt)
    b = s_fn(x_d, xt)
    return 0.5 * np.sqrt(a ** 2 + b ** 2)


def retrieval_curve(s_fn, x_s, x_d, grid_n: int = 200):
    """``(x~ grid, loss values)`` over ``(0, 2 pi]``."""
    g = angle_grid(grid_n)
    return g, np.asarray(retrieval_loss(s_fn, g, x_s, x_d), dtype=float)


def retrieval_optimum(s_fn, x_s, x_d, grid_n: int = 200):
    """Grid minimizer ``(x~*, loss*)``; ties go to the smallest ``x~``."""
    g, vals = retrieval_curve(s_fn, x_s, x_d, grid_n)
    k = int(np.argmin(vals))  # argmin returns the first occurrence
    return float(g[k]), float(vals[k])


def lambda_improvement(x_s, x_d, grid_n: int = 200, s1=toy_s1_closed, s2=toy_s2_closed) -> float:
    """Optimal retrieval loss under ``s1`` minus that under ``s2``.

    Each measure is evaluated at its own grid optimum. Negative values mean
    ``s1`` separates the two reference points better.
    """
    return retrieval_optimum(s1, x_s, x_d, grid_n)[1] - retrieval_optimum(s2, x_s, x_d, grid_n)[1]


def lambda_map(grid_xy: int = 50, grid_n: int = 200, s1=toy_s1_closed, s2=toy_s2_closed):
    """:func:`lambda_improvement` over an ``(x_s, x_d)`` grid on the torus.

    Returns the axis values and a ``(grid_xy, grid_xy)`` array indexed
    ``[i_s, i_d]``.
    """
    axis = angle_grid(grid_xy)
    g = angle_grid(grid_n)
    xs = axis[:, None, None]
    xd = axis[None, :, None]
    best = []
    for s_fn in (s1, s2):
        vals = 0.5 * np.sqrt((1.0 - s_fn(xs, g)) ** 2 + s_fn(xd, g) ** 2)
        best.append(vals.min(axis=2))
    return axis, best[0] - best[1]


def wasserstein_1d(a, b) -> float:
    """Earth mover's distance between two 1-D empirical distributions."""
    a = np.ravel(np.asarray(a, dtype=float))
    b = np.ravel(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    return float(wasserstein_distance(a, b))


def _signed_labels(labels) -> np.ndarray:
    labels = np.asarray(labels).reshape(-1)
    classes = np.unique(labels)
    if classes.size != 2:
        raise ValueError(f"need exactly two classes, got {classes.size}")
    if set(classes.tolist()) <= {-1, 1}:
        return labels.astype(float)
    # the smaller class id maps to +1
    return np.where(labels == classes[0], 1.0, -1.0)


def goodness_estimate(s_fn, points, labels, gamma: float, reference=None,
                      reference_labels=None) -> GoodnessReport:
    """Fraction of points that are not on average ``gamma`` closer to their own class.

    Parameters
    ----------
    s_fn : callable
        ``s_fn(A, B)`` returns the ``(len(A), len(B))`` similarity matrix.
    points, labels : array_like
        Points to score; labels are +1/-1 or two class ids.
    gamma : float
        Margin threshold.
    reference, reference_labels : array_like, optional
        Set the margins are averaged over. Defaults to ``points`` itself, in
        which case every point is left out of its own average.

    Notes
    -----
    The reference indicator is fixed to all points (``tau = 1``), so the
    result certifies a sufficient condition only.
    """
    y = _signed_labels(labels)
    points = np.asarray(points, dtype=float)
    for c in (-1.0, 1.0):
        if np.sum(y == c) < 2:
            raise ValueError("need at least two points per class")
    if reference is None:
        S = np.asarray(s_fn(points, points), dtype=float)
        yy = y[:, None] * y[None, :] * S
        np.fill_diagonal(yy, 0.0)
        margins = yy.sum(axis=1) / (len(y) - 1)
    else:
        yr = _signed_labels(reference_labels)
        S = np.asarray(s_fn(points, np.asarray(reference, dtype=float)), dtype=float)
        margins = (y[:, None] * yr[None, :] * S).mean(axis=1)
    violations = int(np.sum(margins < gamma))
    return GoodnessReport(float(gamma), violations / len(y), 1.0, violations, len(y), margins)


def landmark_count(gamma: float, delta: float, tau: float = 1.0) -> int:
    """Landmarks needed for the linear-separator guarantee.

    ``ceil((2 / tau) * (log(2/delta) + 8 log(2/delta) / gamma^2))``.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    L = math.log(2.0 / delta)
    d = (2.0 / tau) * (L + 8.0 * L / gamma ** 2)
    # forgive round-off just above an integer
    return int(math.ceil(d - 1e-9 * max(1.0, d)))


def landmark_map(s_fn, landmarks, x) -> np.ndarray:
    """Similarities of ``x`` (one point or a batch) to each landmark."""
    landmarks = np.atleast_2d(np.asarray(landmarks, dtype=float))
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    out = np.asarray(s_fn(np.atleast_2d(x), landmarks), dtype=float)
    return out[0] if single else out


def linear_separator_check(phi, labels, l2: float = 1e-3):
    """Fit a linear separator on mapped points.

    L2-regularized logistic regression with a bias, fitted by L-BFGS from
    zero, so the fit is deterministic.

    Returns
    -------
    error_rate : float
        Training misclassification rate.
    margin : float
        ``min_i y_i (w . phi_i + b) / ||w||_1``; negative when not separable.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    y = _signed_labels(labels)
    if len(phi) != len(y):
        raise ValueError("phi and labels differ in length")
    if np.all(np.ptp(phi, axis=0) == 0):
        raise ValueError("all mapped points are identical")
    A = np.hstack([phi, np.ones((len(phi), 1))])

    def objective(v):
        z = y * (A @ v)
        f = np.mean(np.logaddexp(0.0, -z)) + 0.5 * l2 * v[:-1] @ v[:-1]
        sig = np.exp(-np.logaddexp(0.0, z))  # 1 / (1 + e^z)
        grad = -(A.T @ (y * sig)) / len(y)
        grad[:-1] += l2 * v[:-1]
        return f, grad

    res = minimize(objective, np.zeros(A.shape[1]), jac=True, method="L-BFGS-B",
                   options={"maxiter": 2000, "gtol": 1e-10})
    w, b = res.x[:-1], res.x[-1]
    scores = phi @ w + b
    error = float(np.mean(np.sign(scores) != y))
    norm = float(np.sum(np.abs(w)))
    margin = float(np.min(y * scores) / norm) if norm > 0 else 0.0
    return error, margin
