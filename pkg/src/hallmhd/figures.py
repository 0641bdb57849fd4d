"""Matplotlib renderings written next to the delimited outputs.

Figures are a convenience layer over the CSV contract: nothing in the
package asserts against pixels, and every figure writer is a pure
function from arrays to one PNG file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_decay_figure(path: str, times, values_by_label: dict[str, np.ndarray],
                      fits: dict[str, float] | None = None,
                      title: str = "decay") -> str:
    """Log-log norms against 1+t with optional fitted-slope guide lines."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    shifted = 1.0 + np.asarray(times)
    for label, values in values_by_label.items():
        line, = ax.loglog(shifted, values, marker=".", lw=1.0, label=label)
        if fits and label in fits:
            slope = fits[label]
            anchor = values[len(values) // 2]
            t_mid = shifted[len(values) // 2]
            guide = anchor * (shifted / t_mid) ** slope
            ax.loglog(shifted, guide, "--", color=line.get_color(), lw=0.8,
                      label=f"{label}: slope {slope:+.3f}")
    ax.set_xlabel("1 + t")
    ax.set_ylabel("norm")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_series_figure(path: str, times, columns: dict[str, np.ndarray],
                       title: str = "time series", logy: bool = True) -> str:
    """Named columns over time on a (semi-log) axis."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    plot = ax.semilogy if logy else ax.plot
    for label, values in columns.items():
        plot(times, values, lw=1.0, label=label)
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_residual_figure(path: str, labels: list[str], values: np.ndarray,
                         threshold: float | None = None,
                         title: str = "residuals") -> str:
    """Per-case residual magnitudes on a log axis with a threshold line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = np.arange(len(values))
    ax.semilogy(x, np.maximum(np.abs(values), 1e-300), "o", ms=4)
    if threshold is not None:
        ax.axhline(threshold, color="tab:red", lw=0.8,
                   label=f"threshold {threshold:g}")
        ax.legend(fontsize=8)
    ax.set_xticks(x[:: max(1, len(x) // 20)])
    ax.set_xlabel(" / ".join(labels) if len(labels) < 4 else "case")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
