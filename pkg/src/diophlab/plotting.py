"""Small matplotlib helpers for the report paths.

Rendering is always to files (Agg backend); the CLI emits the underlying
CSV and a gnuplot script next to every image so no figure depends on this
module being importable.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_PHI = (1 + 5 ** 0.5) / 2


def save_series_plot(path, x, series, title="", xlabel="N", ylabel="",
                     logx=False, width=7.0):
    """One x column against several named y columns, written to `path`.

    series: list of (label, values) with len(values) == len(x).
    """
    fig, ax = plt.subplots(figsize=(width, width / _PHI))
    for label, ys in series:
        ax.plot(x, ys, label=label, linewidth=1.2)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
