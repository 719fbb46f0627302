"""Bagged decision trees (random forest) for binary classification.

Each tree sees a bootstrap resample (as multiplicity weights) and
considers a fresh random feature subset at every split, scanning
histogram thresholds for the largest weighted Gini impurity decrease.
Tree leaves store the weighted positive fraction; the forest prediction
is the plain mean over trees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import bin_matrix
from .common import check_binary_labels, check_feature_matrix
from .trees import Tree, TreeEnsemble


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = 12  # None = grow until pure
    max_bins: int = 64
    min_samples_leaf: int = 1
    bootstrap: bool = True
    features_per_split: int | str = "sqrt"  # "sqrt", "all", or a count

    def __post_init__(self) -> None:
        if self.n_trees < 1 or self.min_samples_leaf < 1:
            raise ValueError("invalid forest configuration")
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("sqrt", "all"):
                raise ValueError('features_per_split must be "sqrt", "all", or an int')
        elif self.features_per_split < 1:
            raise ValueError("features_per_split must be positive")


def _gini_best_split(binned, cuts, weights, pos_weights, rows, features, min_samples_leaf):
    """(feature, bin, threshold, decrease) with the usual tie rule, or None."""
    w = weights[rows]
    wy = pos_weights[rows]
    total_w = float(w.sum())
    total_wy = float(wy.sum())
    if total_w <= 0:
        return None
    parent_impurity = _gini(total_wy, total_w)
    best = None
    n = len(rows)
    for f in features:
        nb = len(cuts[f]) + 1
        if nb < 2:
            continue
        col = binned[rows, f]
        hist_w = np.bincount(col, weights=w, minlength=nb)
        hist_wy = np.bincount(col, weights=wy, minlength=nb)
        hist_n = np.bincount(col, minlength=nb)
        w_left = np.cumsum(hist_w)[:-1]
        wy_left = np.cumsum(hist_wy)[:-1]
        n_left = np.cumsum(hist_n)[:-1]
        n_right = n - n_left
        valid = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf) & (w_left > 0)
        w_right = total_w - w_left
        valid &= w_right > 0
        if not valid.any():
            continue
        wy_right = total_wy - wy_left
        with np.errstate(divide="ignore", invalid="ignore"):
            imp_left = _gini(wy_left, w_left)
            imp_right = _gini(wy_right, w_right)
        decrease = parent_impurity - (w_left * imp_left + w_right * imp_right) / total_w
        decrease[~valid] = -np.inf
        b = int(np.argmax(decrease))
        if best is None or decrease[b] > best[3]:
            best = (int(f), b, float(cuts[f][b]), float(decrease[b]))
    if best is None or best[3] <= 1e-12:
        return None
    return best


def _gini(wy, w):
    p = wy / w
    return 2.0 * p * (1.0 - p)


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    cfg: ForestConfig = ForestConfig(),
    rng: np.random.Generator | None = None,
) -> TreeEnsemble:
    X = check_feature_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    rng = rng if rng is not None else np.random.default_rng(0)
    n, d = X.shape
    binned, cuts = bin_matrix(X, cfg.max_bins)
    if cfg.features_per_split == "sqrt":
        k = max(1, int(round(np.sqrt(d))))
    elif cfg.features_per_split == "all":
        k = d
    else:
        k = min(d, int(cfg.features_per_split))
    max_depth = np.inf if cfg.max_depth is None else cfg.max_depth

    ensemble = TreeEnsemble(trees=[], mode="bagging", growth="level")
    for _ in range(cfg.n_trees):
        if cfg.bootstrap:
            weights = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.float64)
        else:
            weights = np.ones(n, dtype=np.float64)
        pos_weights = weights * y
        tree = Tree()
        root_rows = np.flatnonzero(weights > 0)
        tree.add_leaf(0.0)
        frontier = [(root_rows, 0, 0)]  # rows, depth, node_id
        while frontier:
            next_frontier = []
            for rows, depth, node_id in frontier:
                w_total = float(weights[rows].sum())
                wy_total = float(pos_weights[rows].sum())
                split = None
                pure = wy_total <= 0.0 or wy_total >= w_total
                if not pure and depth < max_depth and len(rows) >= 2 * cfg.min_samples_leaf:
                    features = np.sort(rng.choice(d, size=k, replace=False))
                    split = _gini_best_split(
                        binned, cuts, weights, pos_weights, rows, features, cfg.min_samples_leaf
                    )
                if split is None:
                    tree.value[node_id] = wy_total / w_total
                    continue
                f, b, threshold, _ = split
                goes_left = binned[rows, f] <= b
                tree.feature[node_id] = f
                tree.threshold[node_id] = threshold
                tree.left[node_id] = tree.add_leaf(0.0)
                tree.right[node_id] = tree.add_leaf(0.0)
                next_frontier.append((rows[goes_left], depth + 1, tree.left[node_id]))
                next_frontier.append((rows[~goes_left], depth + 1, tree.right[node_id]))
            frontier = next_frontier
        ensemble.trees.append(tree)
    return ensemble
