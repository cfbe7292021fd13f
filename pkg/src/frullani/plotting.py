"""Static figures for CLI reports (Agg backend, no display needed)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# PNG metadata carries no timestamp, but pin the software tag so files are
# byte-stable across matplotlib patch releases
_PNG_META = {"Software": "frullani"}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_grid(t, values, path, field: str = "pdf", label: str = "", log_x: bool = False):
    """Line plot of an evaluation grid; ``log_x`` for geometric grids."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(np.asarray(t), np.asarray(values), lw=1.2, color="k")
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(field)
    if label:
        ax.set_title(label, fontsize=9)
    ax.grid(alpha=0.3, lw=0.5)
    return _finish(fig, path)


def plot_sample(x, path, label: str = "", bins: int = 80, log_x: bool | None = None):
    """Histogram of draws; a log axis is chosen for positive, widely spread samples."""
    x = np.asarray(x, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    if x.ndim == 2 and x.shape[1] >= 2:
        ax.plot(x[:, 0], x[:, 1], ",", color="k", alpha=0.5)
        lim = np.quantile(np.abs(x[:, :2]), 0.99)
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        x = x.ravel()
        if log_x is None:
            log_x = bool(np.all(x > 0)) and np.quantile(x, 0.99) > 100 * np.quantile(x, 0.01)
        if log_x:
            edges = np.geomspace(x.min(), x.max(), bins + 1)
            ax.set_xscale("log")
        else:
            lo, hi = np.quantile(x, [0.005, 0.995])
            edges = np.linspace(lo, hi, bins + 1)
        ax.hist(x, bins=edges, density=True, color="0.6", edgecolor="none")
        ax.set_xlabel("value")
        ax.set_ylabel("density")
    if label:
        ax.set_title(label, fontsize=9)
    return _finish(fig, path)
