"""Derivative-free minimization by linear interpolation on a simplex.

This is Powell's COBYLA used without constraints. ``n + 1`` interpolation
points define a linear model of the objective. Each iteration steps to the
model minimizer inside a trust region around the best vertex. The trial point
replaces the vertex whose Lagrange function is largest there, which keeps the
simplex well poised. The resolution ``rho`` falls from ``rho_begin`` to
``rho_end``. The trust radius ``delta`` never drops below ``rho`` but may
grow after successful steps, which helps along curved valleys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["MinimizeResult", "minimize_cobyla"]


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    n_evals: int
    history: list = field(default_factory=list)
    rho: float = float("nan")
    message: str = ""


_SHRINK = 0.7
_GROW = 2.0


class _Budget(Exception):
    pass


def minimize_cobyla(fun, x0, rho_begin=0.5, rho_end=1e-4, max_evals=1000,
                    resample: str = "none") -> MinimizeResult:
    """Minimize ``fun`` starting from ``x0``.

    Parameters
    ----------
    fun : callable
        ``fun(x) -> float``. A non-finite value aborts with ``FloatingPointError``.
    x0 : array_like
        Starting point.
    rho_begin, rho_end : float
        Initial and final resolution; ``rho_begin > rho_end > 0``.
    max_evals : int
        Hard cap on objective evaluations.
    resample : {"none", "reduce", "fail"}
        For noisy objectives: re-evaluate the best vertex and keep the mean of
        its samples, either before every ``rho`` reduction or after every
        failed trial step.

    Returns
    -------
    MinimizeResult
        Best point seen, its value, and the full ``(eval_index, value)`` history.
    """
    if not rho_begin > rho_end > 0:
        raise ValueError("need rho_begin > rho_end > 0")
    x0 = np.asarray(x0, dtype=float).reshape(-1).copy()
    n = x0.size
    history = []
    best = {"x": x0.copy(), "f": math.inf}

    def evaluate(x):
        if len(history) >= max_evals:
            raise _Budget
        f = float(fun(x))
        if not math.isfinite(f):
            raise FloatingPointError(
                f"objective returned {f} at evaluation {len(history)} (x = {np.array2string(x)})"
            )
        history.append((len(history), f))
        if f < best["f"]:
            best["x"], best["f"] = x.copy(), f
        return f

    rho = delta = float(rho_begin)
    message = "rho reached rho_end"
    try:
        Y = np.tile(x0, (n + 1, 1))
        F = np.empty(n + 1)
        counts = np.ones(n + 1)
        F[0] = evaluate(x0)
        for i in range(n):
            Y[i + 1, i] += rho
            F[i + 1] = evaluate(Y[i + 1])

        while True:
            k = int(np.argmin(F))
            xopt, fopt = Y[k], F[k]
            others = [j for j in range(n + 1) if j != k]
            D = Y[others] - xopt
            try:
                Dinv = np.linalg.inv(D)
            except np.linalg.LinAlgError:
                Dinv = np.linalg.pinv(D)
            g = Dinv @ (F[others] - fopt)
            gnorm = float(np.linalg.norm(g))

            improved = False
            if gnorm > 0:
                step = -(delta / gnorm) * g
                fnew = evaluate(xopt + step)
                predicted = delta * gnorm
                ratio = (fopt - fnew) / predicted
                improved = ratio >= 0.1
                _replace_vertex(Y, F, counts, k, others, Dinv, xopt + step, fnew, delta)
                if ratio <= 0.1:
                    delta = _SHRINK * delta
                elif ratio <= 0.7:
                    delta = max(0.5 * delta, float(np.linalg.norm(step)))
                else:
                    delta = max(0.5 * delta, _GROW * float(np.linalg.norm(step)))
                if delta <= 1.5 * rho:
                    delta = rho
            if improved:
                continue
            if resample == "fail" and _resample_best(Y, F, counts, evaluate):
                continue

            # geometry repair before giving up on this resolution
            k = int(np.argmin(F))
            others = [j for j in range(n + 1) if j != k]
            D = Y[others] - Y[k]
            dist = np.linalg.norm(D, axis=1)
            try:
                Dinv = np.linalg.inv(D)
                height = 1.0 / np.linalg.norm(Dinv, axis=0)
            except np.linalg.LinAlgError:
                height = np.zeros(n)
            far = int(np.argmax(dist))
            thin = int(np.argmin(height))
            limit = max(delta, rho)
            if dist[far] > 2.0 * limit or height[thin] < 0.25 * rho:
                j = far if dist[far] > 2.0 * limit else thin
                _geometry_step(Y, F, counts, k, others[j], D, j, rho, evaluate)
                continue
            if delta > rho and gnorm > 0:
                continue

            if resample == "reduce" and _resample_best(Y, F, counts, evaluate):
                continue
            if rho <= rho_end:
                break
            rho_old = rho
            if rho > 250 * rho_end:
                rho = 0.1 * rho
            elif rho <= 16 * rho_end:
                rho = rho_end
            else:
                rho = math.sqrt(rho * rho_end)
            delta = max(0.5 * rho_old, rho)
    except _Budget:
        message = "evaluation budget exhausted"
    return MinimizeResult(best["x"], best["f"], len(history), history, rho, message)


def _resample_best(Y, F, counts, evaluate) -> bool:
    """Average a fresh sample into the best vertex; True if another vertex is now best."""
    k = int(np.argmin(F))
    f = evaluate(Y[k])
    F[k] = (F[k] * counts[k] + f) / (counts[k] + 1)
    counts[k] += 1
    return int(np.argmin(F)) != k


def _replace_vertex(Y, F, counts, k, others, Dinv, xnew, fnew, delta):
    """Swap ``xnew`` into the simplex in place of the least useful vertex."""
    s = xnew - Y[k]
    ell = Dinv.T @ s  # Lagrange values of the non-optimal vertices at xnew
    dist = np.linalg.norm(Y[others] - Y[k], axis=1)
    score = np.abs(ell) * np.maximum(1.0, dist / delta) ** 2
    candidates = list(others)
    scores = list(score)
    if fnew < F[k]:
        # the old best vertex may leave too; its Lagrange value is 1 - sum(ell)
        candidates.append(k)
        scores.append(abs(1.0 - float(np.sum(ell))))
    j = int(np.argmax(scores))
    if scores[j] <= 1e-12:
        return
    Y[candidates[j]] = xnew
    F[candidates[j]] = fnew
    counts[candidates[j]] = 1


def _geometry_step(Y, F, counts, k, vertex, D, j, rho, evaluate):
    """Move ``vertex`` to distance ``rho`` from the best point, off the opposite face."""
    try:
        w = np.linalg.inv(D)[:, j]
    except np.linalg.LinAlgError:
        w = np.zeros(D.shape[1])
    if not np.any(w):
        w = np.zeros(D.shape[1])
        w[j % D.shape[1]] = 1.0
    direction = w / np.linalg.norm(w)
    # keep the side the vertex was on
    if np.dot(direction, D[j]) < 0:
        direction = -direction
    x = Y[k] + rho * direction
    F[vertex] = evaluate(x)
    Y[vertex] = x
    counts[vertex] = 1
