"""Histogram-based best-split search for gradient boosting.

Split quality for a candidate partition (L, R) of a node with gradient
and hessian sums (G, H):

    gain = G_L^2/(H_L + lam) + G_R^2/(H_R + lam) - G^2/(H + lam)

Ties break toward the lowest feature index, then the lowest threshold;
a node whose best gain is <= 0 is not split.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class SplitDecision:
    feature: int
    bin: int  # rows with binned value <= bin go left
    threshold: float
    gain: float


def find_best_split(
    binned: np.ndarray,
    cuts: Sequence[np.ndarray],
    grad: np.ndarray,
    hess: np.ndarray,
    lam: float = 1.0,
    min_samples_leaf: int = 1,
    features: np.ndarray | None = None,
) -> SplitDecision | None:
    """Scan histogram thresholds of the given rows; None means no split.

    ``binned``/``grad``/``hess`` are node-local (already subset to the
    node's rows). ``features`` restricts the scan (bagging's per-split
    feature sampling); it must be sorted ascending for the tie rule.
    """
    n = binned.shape[0]
    total_g = float(grad.sum())
    total_h = float(hess.sum())
    parent_score = total_g * total_g / (total_h + lam)
    best: SplitDecision | None = None
    feature_ids = range(binned.shape[1]) if features is None else features
    for f in feature_ids:
        nb = len(cuts[f]) + 1
        if nb < 2:
            continue
        col = binned[:, f]
        hist_g = np.bincount(col, weights=grad, minlength=nb)
        hist_h = np.bincount(col, weights=hess, minlength=nb)
        hist_n = np.bincount(col, minlength=nb)
        g_left = np.cumsum(hist_g)[:-1]
        h_left = np.cumsum(hist_h)[:-1]
        n_left = np.cumsum(hist_n)[:-1]
        n_right = n - n_left
        valid = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
        if not valid.any():
            continue
        g_right = total_g - g_left
        h_right = total_h - h_left
        gains = (
            g_left * g_left / (h_left + lam)
            + g_right * g_right / (h_right + lam)
            - parent_score
        )
        gains[~valid] = -np.inf
        b = int(np.argmax(gains))  # first max: lowest threshold on ties
        if best is None or gains[b] > best.gain:
            best = SplitDecision(
                feature=int(f), bin=b, threshold=float(cuts[f][b]), gain=float(gains[b])
            )
    if best is None or best.gain <= 0.0:
        return None
    return best
