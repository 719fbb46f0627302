"""Decision tree storage shared by the bagging and boosting ensembles.

Nodes live in flat parallel arrays; routing sends a row left when
``x[feature] < threshold``. Leaf values are probabilities for bagging
trees and margin contributions (shrinkage already applied) for boosting
trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .common import check_feature_matrix, sigmoid

LEAF = -1


@dataclass
class Tree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def add_leaf(self, value: float) -> int:
        return self._add(LEAF, 0.0, LEAF, LEAF, value)

    def add_internal(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, LEAF, LEAF, 0.0)

    def _add(self, feature, threshold, left, right, value) -> int:
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(int(left))
        self.right.append(int(right))
        self.value.append(float(value))
        return len(self.feature) - 1

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def leaf_count(self) -> int:
        return sum(1 for f in self.feature if f == LEAF)

    def depth(self) -> int:
        def walk(node: int, d: int) -> int:
            if self.feature[node] == LEAF:
                return d
            return max(walk(self.left[node], d + 1), walk(self.right[node], d + 1))

        return walk(0, 0) if self.node_count else 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Per-row leaf values, routed iteratively (no recursion limit)."""
        out = np.empty(X.shape[0], dtype=np.float64)
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if len(rows) == 0:
                continue
            if self.feature[node] == LEAF:
                out[rows] = self.value[node]
                continue
            goes_left = X[rows, self.feature[node]] < self.threshold[node]
            stack.append((self.left[node], rows[goes_left]))
            stack.append((self.right[node], rows[~goes_left]))
        return out

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=[int(x) for x in d["feature"]],
            threshold=[float(x) for x in d["threshold"]],
            left=[int(x) for x in d["left"]],
            right=[int(x) for x in d["right"]],
            value=[float(x) for x in d["value"]],
        )


@dataclass
class TreeEnsemble:
    trees: list[Tree]
    mode: str  # "bagging" | "boosting"
    growth: str  # "level" | "leaf"
    learning_rate: float = 1.0
    base_score: float = 0.0  # margin offset (boosting only)

    def __post_init__(self) -> None:
        if self.mode not in ("bagging", "boosting"):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        if self.growth not in ("level", "leaf"):
            raise ValueError(f"unknown growth {self.growth!r}")

    def decision_margin(self, X: np.ndarray) -> np.ndarray:
        """Boosting: summed leaf contributions plus the base score."""
        margin = np.full(X.shape[0], self.base_score, dtype=np.float64)
        for tree in self.trees:
            margin += tree.predict(X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_feature_matrix(X)
        if self.mode == "boosting":
            return sigmoid(self.decision_margin(X))
        probs = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            probs += tree.predict(X)
        return probs / max(len(self.trees), 1)

    def to_dict(self) -> dict:
        return {
            "trees": [t.to_dict() for t in self.trees],
            "mode": self.mode,
            "growth": self.growth,
            "learning_rate": self.learning_rate,
            "base_score": self.base_score,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeEnsemble":
        return cls(
            trees=[Tree.from_dict(t) for t in d["trees"]],
            mode=d["mode"],
            growth=d["growth"],
            learning_rate=float(d["learning_rate"]),
            base_score=float(d["base_score"]),
        )
