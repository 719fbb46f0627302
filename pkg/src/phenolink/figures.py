"""Matplotlib figure rendering for the report paths.

Figures are written next to the delimited outputs they visualize: the
degree distribution beside ``degree_histogram.csv`` and the ROC/PR
curves beside the curve CSVs. Everything uses the Agg backend so runs
are headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render_degree_distribution(
    histogram_rows: list[tuple[int, int]], path: str | Path, title: str = "Degree distribution"
) -> None:
    degrees = np.array([d for d, _ in histogram_rows])
    counts = np.array([c for _, c in histogram_rows])
    fig, (ax_lin, ax_log) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax_lin.bar(degrees, counts, width=0.9, color="#4878a8")
    ax_lin.set_xlabel("degree")
    ax_lin.set_ylabel("node count")
    ax_lin.set_title(title)
    positive = counts > 0
    ax_log.scatter(degrees[positive], counts[positive], s=14, color="#a85448")
    ax_log.set_xscale("log")
    ax_log.set_yscale("log")
    ax_log.set_xlabel("degree (log)")
    ax_log.set_ylabel("node count (log)")
    ax_log.set_title("log-log")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_curves(
    roc_points: np.ndarray,
    pr_points: np.ndarray,
    auroc: float,
    aucpr: float,
    positive_rate: float,
    path: str | Path,
) -> None:
    fig, (ax_roc, ax_pr) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    ax_roc.plot(roc_points[:, 0], roc_points[:, 1], color="#4878a8", lw=1.5)
    ax_roc.plot([0, 1], [0, 1], ls="--", lw=0.8, color="gray")
    ax_roc.set_xlabel("false positive rate")
    ax_roc.set_ylabel("true positive rate")
    ax_roc.set_title(f"ROC (AUROC = {auroc:.3f})")
    ax_roc.set_xlim(-0.02, 1.02)
    ax_roc.set_ylim(-0.02, 1.02)
    ax_pr.plot(pr_points[:, 0], pr_points[:, 1], color="#a85448", lw=1.5, drawstyle="steps-post")
    ax_pr.axhline(positive_rate, ls="--", lw=0.8, color="gray")
    ax_pr.set_xlabel("recall")
    ax_pr.set_ylabel("precision")
    ax_pr.set_title(f"PR (AUCPR = {aucpr:.3f})")
    ax_pr.set_xlim(-0.02, 1.02)
    ax_pr.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
