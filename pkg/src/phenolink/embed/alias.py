"""Walker alias method: O(1) draws from a fixed discrete distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class AliasTable:
    """Probability/alias array pair over K categories.

    Drawing picks a uniform slot k, then keeps k with probability
    ``prob[k]`` and otherwise returns ``alias[k]``.
    """

    prob: np.ndarray  # float64 in [0, 1]
    alias: np.ndarray  # int32

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "AliasTable":
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("weights must be a non-empty 1-d array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must not all be zero")
        prob, alias = _build_alias_arrays(w / total)
        return cls(prob=prob, alias=alias)

    def __len__(self) -> int:
        return len(self.prob)

    def probabilities(self) -> np.ndarray:
        """Reconstruct the encoded category probabilities (for checks)."""
        k = len(self.prob)
        p = self.prob.copy()
        np.add.at(p, self.alias, 1.0 - self.prob)
        return p / k


def _build_alias_arrays(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = len(probs)
    prob = probs * k
    alias = np.arange(k, dtype=np.int32)
    small = [i for i in range(k) if prob[i] < 1.0]
    large = [i for i in range(k) if prob[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        alias[s] = l
        prob[l] = (prob[l] + prob[s]) - 1.0
        if prob[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    # leftovers are 1.0 up to float round-off
    for i in small:
        prob[i] = 1.0
    for i in large:
        prob[i] = 1.0
    return prob, alias


def sample_alias(table: AliasTable, rng: np.random.Generator) -> int:
    """Draw one category index from the table's distribution."""
    k = int(rng.random() * len(table.prob))
    if k >= len(table.prob):  # guard against rng.random() returning 1.0-eps edge
        k = len(table.prob) - 1
    if rng.random() < table.prob[k]:
        return k
    return int(table.alias[k])
