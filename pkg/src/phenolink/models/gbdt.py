"""Gradient-boosted trees on logistic loss with two growth strategies.

Level-wise growth expands every splittable frontier node of the current
depth; leaf-wise growth repeatedly expands the single frontier leaf with
the highest gain (bounded by ``max_leaves``). Everything else — the
histogram splitter, the gain formula, leaf values -G/(H + lam) scaled by
the learning rate, and ``scale_pos_weight`` on positive rows — is shared
between the two modes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .binning import bin_matrix
from .common import check_binary_labels, check_feature_matrix
from .splitting import find_best_split
from .trees import Tree, TreeEnsemble


@dataclass(frozen=True)
class GbdtConfig:
    growth: str = "leaf"  # "leaf" (depth default 10) or "level" (depth default 12)
    learning_rate: float = 0.1
    max_depth: int | None = None
    n_trees: int = 100
    max_leaves: int = 31  # leaf-wise only
    scale_pos_weight: float = 99.0
    max_bins: int = 64
    min_samples_leaf: int = 1
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.growth not in ("leaf", "level"):
            raise ValueError('growth must be "leaf" or "level"')
        if self.learning_rate <= 0 or self.n_trees < 1 or self.max_leaves < 2:
            raise ValueError("invalid gbdt configuration")
        if self.scale_pos_weight <= 0 or self.min_samples_leaf < 1 or self.lam < 0:
            raise ValueError("invalid gbdt configuration")

    @property
    def resolved_max_depth(self) -> int:
        if self.max_depth is not None:
            return self.max_depth
        return 10 if self.growth == "leaf" else 12


@dataclass
class _Frontier:
    rows: np.ndarray
    depth: int
    node_id: int


def _leaf_value(grad_sum: float, hess_sum: float, cfg: GbdtConfig) -> float:
    return -grad_sum / (hess_sum + cfg.lam) * cfg.learning_rate


def _grow_tree(
    binned: np.ndarray,
    cuts: list[np.ndarray],
    grad: np.ndarray,
    hess: np.ndarray,
    cfg: GbdtConfig,
) -> tuple[Tree, list[tuple[np.ndarray, float]]]:
    """One regression tree on (grad, hess); returns it with leaf partitions."""
    if cfg.growth == "level":
        return _grow_level_wise(binned, cuts, grad, hess, cfg)
    return _grow_leaf_wise(binned, cuts, grad, hess, cfg)


def _split_rows(
    binned: np.ndarray, rows: np.ndarray, feature: int, bin_id: int
) -> tuple[np.ndarray, np.ndarray]:
    goes_left = binned[rows, feature] <= bin_id
    return rows[goes_left], rows[~goes_left]


def _finalize_leaf(
    tree: Tree, node_id: int, rows: np.ndarray, grad, hess, cfg
) -> tuple[np.ndarray, float]:
    value = _leaf_value(float(grad[rows].sum()), float(hess[rows].sum()), cfg)
    tree.feature[node_id] = -1
    tree.value[node_id] = value
    return rows, value


def _grow_level_wise(binned, cuts, grad, hess, cfg):
    tree = Tree()
    root_rows = np.arange(binned.shape[0])
    tree.add_leaf(0.0)
    frontier = [_Frontier(rows=root_rows, depth=0, node_id=0)]
    leaves: list[tuple[np.ndarray, float]] = []
    while frontier:
        next_frontier: list[_Frontier] = []
        for node in frontier:
            split = None
            if node.depth < cfg.resolved_max_depth and len(node.rows) >= 2 * cfg.min_samples_leaf:
                split = find_best_split(
                    binned[node.rows],
                    cuts,
                    grad[node.rows],
                    hess[node.rows],
                    lam=cfg.lam,
                    min_samples_leaf=cfg.min_samples_leaf,
                )
            if split is None:
                leaves.append(_finalize_leaf(tree, node.node_id, node.rows, grad, hess, cfg))
                continue
            left_rows, right_rows = _split_rows(binned, node.rows, split.feature, split.bin)
            tree.feature[node.node_id] = split.feature
            tree.threshold[node.node_id] = split.threshold
            tree.left[node.node_id] = tree.add_leaf(0.0)
            tree.right[node.node_id] = tree.add_leaf(0.0)
            next_frontier.append(
                _Frontier(rows=left_rows, depth=node.depth + 1, node_id=tree.left[node.node_id])
            )
            next_frontier.append(
                _Frontier(rows=right_rows, depth=node.depth + 1, node_id=tree.right[node.node_id])
            )
        frontier = next_frontier
    return tree, leaves


def _grow_leaf_wise(binned, cuts, grad, hess, cfg):
    tree = Tree()
    root_rows = np.arange(binned.shape[0])
    tree.add_leaf(0.0)
    leaves: list[tuple[np.ndarray, float]] = []
    heap: list[tuple[float, int, _Frontier, object]] = []
    counter = 0

    def consider(node: _Frontier) -> None:
        nonlocal counter
        split = None
        if node.depth < cfg.resolved_max_depth and len(node.rows) >= 2 * cfg.min_samples_leaf:
            split = find_best_split(
                binned[node.rows],
                cuts,
                grad[node.rows],
                hess[node.rows],
                lam=cfg.lam,
                min_samples_leaf=cfg.min_samples_leaf,
            )
        if split is None:
            leaves.append(_finalize_leaf(tree, node.node_id, node.rows, grad, hess, cfg))
        else:
            heapq.heappush(heap, (-split.gain, counter, node, split))
            counter += 1

    consider(_Frontier(rows=root_rows, depth=0, node_id=0))
    n_leaves = 1
    while heap and n_leaves < cfg.max_leaves:
        _, _, node, split = heapq.heappop(heap)
        left_rows, right_rows = _split_rows(binned, node.rows, split.feature, split.bin)
        tree.feature[node.node_id] = split.feature
        tree.threshold[node.node_id] = split.threshold
        tree.left[node.node_id] = tree.add_leaf(0.0)
        tree.right[node.node_id] = tree.add_leaf(0.0)
        n_leaves += 1
        consider(_Frontier(rows=left_rows, depth=node.depth + 1, node_id=tree.left[node.node_id]))
        consider(_Frontier(rows=right_rows, depth=node.depth + 1, node_id=tree.right[node.node_id]))
    while heap:  # leaf budget exhausted: pending nodes become leaves
        _, _, node, _ = heapq.heappop(heap)
        leaves.append(_finalize_leaf(tree, node.node_id, node.rows, grad, hess, cfg))
    return tree, leaves


def train_gbdt(
    X: np.ndarray,
    y: np.ndarray,
    cfg: GbdtConfig = GbdtConfig(),
    rng: np.random.Generator | None = None,
) -> TreeEnsemble:
    """Boost ``n_trees`` rounds of logistic loss; deterministic (``rng``
    is accepted for interface parity, no subsampling is performed)."""
    X = check_feature_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    binned, cuts = bin_matrix(X, cfg.max_bins)
    sw = np.where(y == 1.0, cfg.scale_pos_weight, 1.0)
    margin = np.zeros(X.shape[0], dtype=np.float64)
    ensemble = TreeEnsemble(
        trees=[], mode="boosting", growth=cfg.growth,
        learning_rate=cfg.learning_rate, base_score=0.0,
    )
    round_losses: list[float] = []
    for _ in range(cfg.n_trees):
        p = 1.0 / (1.0 + np.exp(-margin))
        grad = sw * (p - y)
        hess = sw * p * (1.0 - p)
        tree, leaves = _grow_tree(binned, cuts, grad, hess, cfg)
        for rows, value in leaves:
            margin[rows] += value
        ensemble.trees.append(tree)
        loss = float(np.sum(sw * (np.logaddexp(0.0, margin) - y * margin)) / sw.sum())
        round_losses.append(loss)
    ensemble.round_losses = round_losses  # training trace, not serialized
    return ensemble
