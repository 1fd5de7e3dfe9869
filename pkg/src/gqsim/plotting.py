"""Static SVG figures with reproducible bytes.

matplotlib's SVG backend stamps a date and random element ids unless told
otherwise; both are pinned here so identical inputs give identical files.
"""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["heatmap", "line_plot", "scatter_plot", "overlay_heatmap"]

_RC = {"svg.hashsalt": "gqsim", "svg.fonttype": "none", "font.size": 9}


@contextmanager
def _figure(path, meta, figsize=(4.5, 3.6)):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=figsize)
        try:
            yield fig, ax
            desc = " ".join(f"{k}={meta[k]}" for k in sorted(meta))
            fig.tight_layout()
            fig.savefig(Path(path), format="svg", metadata={"Date": None, "Description": desc})
        finally:
            plt.close(fig)


def heatmap(path, Z, extent, meta, title="", xlabel="", ylabel="", cmap="viridis",
            colorbar=True, vmin=None, vmax=None):
    """``Z[i, j]`` drawn with row ``i`` along the y axis."""
    with _figure(path, meta) as (fig, ax):
        im = ax.imshow(np.asarray(Z), origin="lower", extent=extent, aspect="auto", cmap=cmap,
                       vmin=vmin, vmax=vmax, interpolation="nearest")
        if colorbar:
            fig.colorbar(im, ax=ax)
        ax.set(title=title, xlabel=xlabel, ylabel=ylabel)


def overlay_heatmap(path, Z, extent, meta, points=(), paths=(), title="", xlabel="", ylabel="",
                    cmap="viridis"):
    """Heatmap with scatter groups ``(xy, label, color)`` and polylines ``(xy, label, color)``."""
    with _figure(path, meta) as (fig, ax):
        im = ax.imshow(np.asarray(Z), origin="lower", extent=extent, aspect="auto", cmap=cmap,
                       interpolation="nearest")
        fig.colorbar(im, ax=ax)
        for xy, label, color in points:
            xy = np.atleast_2d(xy)
            ax.scatter(xy[:, 0], xy[:, 1], s=10, c=color, label=label, edgecolors="k",
                       linewidths=0.3)
        for xy, label, color in paths:
            xy = np.atleast_2d(xy)
            ax.plot(xy[:, 0], xy[:, 1], "-o", ms=2, color=color, label=label)
        if points or paths:
            ax.legend(loc="upper right", fontsize=7)
        ax.set(title=title, xlabel=xlabel, ylabel=ylabel)


def line_plot(path, x, series, meta, title="", xlabel="", ylabel="", errors=None, logy=False):
    """``series`` maps label -> y values; ``errors`` optionally maps label -> error bars."""
    with _figure(path, meta) as (fig, ax):
        for label, y in series.items():
            if errors and label in errors:
                ax.errorbar(x, y, yerr=errors[label], label=label, capsize=2, marker="o", ms=3)
            else:
                ax.plot(x, y, label=label)
        if logy:
            ax.set_yscale("log")
        if len(series) > 1:
            ax.legend(fontsize=7)
        ax.set(title=title, xlabel=xlabel, ylabel=ylabel)


def scatter_plot(path, groups, meta, title="", xlabel="", ylabel="", logx=False):
    """``groups`` is a list of ``(x, y, label)``."""
    with _figure(path, meta) as (fig, ax):
        for x, y, label in groups:
            ax.scatter(x, y, s=6, alpha=0.6, label=label)
        if logx:
            ax.set_xscale("log")
        if len(groups) > 1:
            ax.legend(fontsize=7)
        ax.set(title=title, xlabel=xlabel, ylabel=ylabel)
