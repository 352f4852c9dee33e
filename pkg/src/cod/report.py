"""Figure rendering for the reporting paths.

Figures are written straight to image files next to the delimited outputs;
nothing here opens a window, so the module is safe on headless boxes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import ExperimentReport
from .outlierness import OutliernessFeatures


def render_outlierness_scatter(feats: OutliernessFeatures, path: str | Path,
                               scores: np.ndarray | None = None,
                               flags: np.ndarray | None = None) -> None:
    """Scatter the samples in the unit square of outlierness coordinates.

    Colored by outlier score when given, otherwise split into plain /
    attribute-flagged / detected groups.
    """
    fig, ax = plt.subplots(figsize=(5.5, 5))
    x, y = feats.values[:, 0], feats.values[:, 1]
    if scores is not None:
        sc = ax.scatter(x, y, c=np.asarray(scores), cmap="coolwarm", vmin=0.0,
                        vmax=1.0, s=22, edgecolors="none", alpha=0.85)
        fig.colorbar(sc, ax=ax, label="outlier score")
    else:
        ax.scatter(x, y, s=22, c="tab:gray", edgecolors="none", alpha=0.7,
                   label="samples")
    if flags is not None:
        flags = np.asarray(flags, dtype=bool)
        if flags.any():
            ax.scatter(x[flags], y[flags], s=60, facecolors="none",
                       edgecolors="tab:red", linewidths=1.2, label="flagged")
    attr = feats.attribute_flag
    if attr.any():
        ax.scatter(x[attr], y[attr], marker="x", s=45, c="black",
                   label="no community")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("community label homogeneity")
    ax.set_ylabel("own-label consistency")
    ax.set_title("Outlierness space")
    handles, labels = ax.get_legend_handles_labels()
    if handles:
        ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_auc_distribution(reports: list[ExperimentReport], path: str | Path) -> None:
    """Box plot of the per-repeat AUC values of each experiment."""
    if not reports:
        raise ValueError("no reports to plot")
    fig, ax = plt.subplots(figsize=(1.6 + 1.3 * len(reports), 4.2))
    data = [rep.aucs for rep in reports]
    labels = [f"{rep.dataset_name}\n{rep.config_name} ({rep.views}v)" for rep in reports]
    ax.boxplot(data, tick_labels=labels, showmeans=True)
    for i, values in enumerate(data, start=1):
        jitter = (np.arange(len(values)) % 7 - 3) * 0.02
        ax.plot(i + jitter, values, linestyle="none", marker="o", markersize=3,
                alpha=0.45, color="tab:blue")
    ax.set_ylabel("AUC")
    ax.set_ylim(0.0, 1.02)
    ax.grid(axis="y", alpha=0.3)
    ax.set_title("AUC across repeats")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
