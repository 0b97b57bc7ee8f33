"""Figure rendering for the report path (written next to the CSV output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_METRICS = (
    ("misclassification", "misclassification_mean", "misclassification_sd"),
    ("brier", "brier_mean", "brier_sd"),
    ("sensitivity", "sensitivity_mean", "sensitivity_sd"),
    ("kappa", "kappa_mean", "kappa_sd"),
)


def render_bench_figure(summaries, path: str | Path) -> Path:
    """Bar panel of per-method metric means with sd whiskers."""
    path = Path(path)
    methods = [s.method for s in summaries]
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, (title, mean_attr, sd_attr) in zip(axes.ravel(), _METRICS):
        means = [getattr(s, mean_attr) for s in summaries]
        sds = [getattr(s, sd_attr) for s in summaries]
        ax.bar(methods, means, yerr=sds, capsize=3, color="#4878a8")
        ax.set_title(title)
        ax.tick_params(axis="x", rotation=20)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figure(blocks, path: str | Path) -> Path:
    """Error rate and selected-tree count as functions of the pool fraction M."""
    path = Path(path)
    fractions = [f for f, _ in blocks]
    methods = [s.method for s in blocks[0][1]]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for method in methods:
        errs = []
        trees = []
        for _, summaries in blocks:
            s = next(x for x in summaries if x.method == method)
            errs.append(s.misclassification_mean)
            trees.append(s.selected_trees_mean)
        ax1.plot(fractions, errs, marker="o", label=method)
        ax2.plot(fractions, trees, marker="o", label=method)
    ax1.set_xlabel("M fraction of T")
    ax1.set_ylabel("misclassification rate")
    ax1.grid(alpha=0.3)
    ax1.legend()
    ax2.set_xlabel("M fraction of T")
    ax2.set_ylabel("mean selected trees")
    ax2.grid(alpha=0.3)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
