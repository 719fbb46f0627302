"""Quantile histogram binning for tree training.

Cut points always fall strictly between two observed values (midpoints),
so binned splits on small data coincide exactly with exhaustive
threshold enumeration; on large columns, equal-frequency ranks pick
which midpoints survive. Bin membership: bin(x) = number of cuts <= x,
matching the routing rule ``x < threshold`` goes left.
"""

from __future__ import annotations

import numpy as np

MAX_BINS_LIMIT = 255  # bins are stored as uint8


def compute_bin_edges(col: np.ndarray, max_bins: int) -> np.ndarray:
    """Cut points (ascending, at most max_bins - 1) for one column."""
    if not 2 <= max_bins <= MAX_BINS_LIMIT:
        raise ValueError(f"max_bins must be in [2, {MAX_BINS_LIMIT}]")
    uniq = np.unique(col)
    if len(uniq) <= 1:
        return np.empty(0, dtype=np.float64)
    midpoints = (uniq[:-1] + uniq[1:]) / 2.0
    if len(uniq) <= max_bins:
        return midpoints
    # equal-frequency ranks select which midpoints survive
    sorted_col = np.sort(col)
    ranks = (np.arange(1, max_bins) * len(col)) // max_bins
    boundary_values = sorted_col[ranks]
    positions = np.searchsorted(uniq, boundary_values, side="right") - 1
    positions = np.unique(np.clip(positions, 0, len(midpoints) - 1))
    return midpoints[positions]


def bin_column(col: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    return np.searchsorted(cuts, col, side="right").astype(np.uint8)


def bin_matrix(X: np.ndarray, max_bins: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Returns (row-major uint8 bin matrix, per-feature cut points)."""
    n, d = X.shape
    binned = np.empty((n, d), dtype=np.uint8)
    cuts: list[np.ndarray] = []
    for f in range(d):
        edges = compute_bin_edges(X[:, f], max_bins)
        cuts.append(edges)
        binned[:, f] = bin_column(X[:, f], edges)
    return binned, cuts
