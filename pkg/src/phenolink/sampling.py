"""Supervised dataset construction from the association graph.

Negatives are the unconnected node pairs of the *full* graph, logically
the zero entries of the strict upper triangle of its adjacency matrix
(the matrix itself is never materialized). Positives are edges removed
from the full graph under a safety guard: a removal must not isolate a
node or split a component, so the residual graph keeps the full graph's
node set and component count. Embeddings are later trained on the
residual graph only; training them on the full graph would leak the
positive labels through adjacency.
"""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .graph import Graph
from .ingest import NodeIndex

logger = logging.getLogger(__name__)

TRAIN, TEST = "train", "test"


@dataclass(frozen=True)
class SamplingConfig:
    """Knobs for dataset construction.

    ``negative_count`` is an absolute number or ``"all"`` (every
    unconnected pair). ``max_connectivity_checks`` caps the number of
    nodes a single reachability search may visit; a search that exhausts
    the cap conservatively treats the edge as unsafe to drop. ``None``
    means unbounded.
    """

    positive_fraction: float = 0.3
    negative_count: int | str = "all"
    rng_seed: int = 0
    max_connectivity_checks: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.positive_fraction < 1.0:
            raise ValueError("positive_fraction must be in (0, 1)")
        if self.negative_count != "all":
            if not isinstance(self.negative_count, int) or self.negative_count < 1:
                raise ValueError('negative_count must be a positive integer or "all"')
        if self.max_connectivity_checks is not None and self.max_connectivity_checks < 1:
            raise ValueError("max_connectivity_checks must be positive or None")


@dataclass
class PairSet:
    """Node pairs stored canonically (u < v), all sharing one label."""

    pairs: np.ndarray  # (k, 2) int32, u < v, no duplicates
    label: int

    def __post_init__(self) -> None:
        self.pairs = np.asarray(self.pairs, dtype=np.int32).reshape(-1, 2)
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")

    def __len__(self) -> int:
        return len(self.pairs)

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.pairs}


@dataclass
class LabeledPairs:
    """Rows (u, v, label, split_tag); split tags are empty until split."""

    u: np.ndarray  # int32
    v: np.ndarray  # int32
    label: np.ndarray  # int8
    split: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.u = np.asarray(self.u, dtype=np.int32)
        self.v = np.asarray(self.v, dtype=np.int32)
        self.label = np.asarray(self.label, dtype=np.int8)
        if not self.split:
            self.split = [""] * len(self.u)
        if not (len(self.u) == len(self.v) == len(self.label) == len(self.split)):
            raise ValueError("column lengths differ")

    def __len__(self) -> int:
        return len(self.u)

    def positive_rate(self) -> float:
        return float(self.label.mean()) if len(self) else 0.0

    def rows_for_split(self, tag: str) -> np.ndarray:
        """Row indices carrying the given split tag."""
        return np.array([i for i, s in enumerate(self.split) if s == tag], dtype=np.int64)


@dataclass
class PositiveSampleResult:
    residual: Graph
    positives: PairSet
    requested: int
    achieved: int

    @property
    def shortfall(self) -> int:
        return self.requested - self.achieved


def count_unconnected_pairs(g: Graph) -> int:
    n = g.node_count
    return n * (n - 1) // 2 - g.edge_count


def _nth_non_neighbor(n: int, u: int, nbrs_gt: np.ndarray, j: int) -> int:
    """The j-th (0-based) node v > u with v not in nbrs_gt (sorted)."""
    v = u + 1 + j
    while True:
        shift = int(np.searchsorted(nbrs_gt, v, side="right"))
        v_next = u + 1 + j + shift
        if v_next == v:
            return v
        v = v_next


def enumerate_negative_pairs(
    g: Graph, cfg: SamplingConfig, rng: np.random.Generator
) -> PairSet:
    """Collect unconnected pairs, equivalent to scanning the strict upper
    triangle of the adjacency matrix for zeros.

    With a finite ``negative_count`` a uniform sample without replacement
    is drawn by sampling pair *indices* in enumeration order, so output
    order is always the (u, v)-lexicographic scan order.
    """
    n = g.node_count
    total = count_unconnected_pairs(g)
    if cfg.negative_count != "all":
        k = cfg.negative_count
        if k > total:
            raise ValueError(
                f"negative_count {k} exceeds the {total} unconnected pairs available"
            )
    else:
        k = total

    rows_gt: list[np.ndarray] = []
    row_counts = np.zeros(n, dtype=np.int64)
    for u in range(n):
        row = g.neighbors(u)
        gt = row[np.searchsorted(row, u + 1) :]
        rows_gt.append(gt)
        row_counts[u] = (n - 1 - u) - len(gt)

    if k == total:
        chunks = []
        for u in range(n):
            if row_counts[u] == 0:
                continue
            candidates = np.setdiff1d(
                np.arange(u + 1, n, dtype=np.int32), rows_gt[u], assume_unique=True
            )
            chunk = np.empty((len(candidates), 2), dtype=np.int32)
            chunk[:, 0] = u
            chunk[:, 1] = candidates
            chunks.append(chunk)
        pairs = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int32)
        return PairSet(pairs=pairs, label=0)

    indices = _sample_indices_without_replacement(total, k, rng)
    row_starts = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(row_counts, out=row_starts[1:])
    pairs = np.empty((k, 2), dtype=np.int32)
    row_of = np.searchsorted(row_starts, indices, side="right") - 1
    for i, (idx, u) in enumerate(zip(indices, row_of)):
        j = int(idx - row_starts[u])
        pairs[i, 0] = u
        pairs[i, 1] = _nth_non_neighbor(n, int(u), rows_gt[u], j)
    return PairSet(pairs=pairs, label=0)


def _sample_indices_without_replacement(
    total: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k distinct sorted indices from [0, total), uniform, seeded."""
    if k * 3 >= total or total <= 2_000_000:
        return np.sort(rng.permutation(total)[:k])
    chosen: set[int] = set()
    while len(chosen) < k:
        draw = rng.integers(0, total, size=k - len(chosen))
        chosen.update(int(x) for x in draw)
    return np.sort(np.fromiter(chosen, dtype=np.int64, count=len(chosen)))


def sample_positive_edges(
    g: Graph, cfg: SamplingConfig, rng: np.random.Generator
) -> PositiveSampleResult:
    """Remove edges under the safety guard and return them as positives.

    Edges are visited in a seeded random permutation. A candidate is
    dropped only if both endpoints keep degree >= 1 afterwards and stay
    mutually reachable in the residual graph (breadth-first check). If the
    target count is unreachable the achieved set is returned with a
    shortfall warning rather than an error.
    """
    m = g.edge_count
    target = int(round(cfg.positive_fraction * m))
    edge_array = np.array(list(g.edges()), dtype=np.int32).reshape(-1, 2)
    order = rng.permutation(m)

    adj: list[set[int]] = [set(int(x) for x in g.neighbors(u)) for u in range(g.node_count)]
    dropped: list[tuple[int, int]] = []
    cap = cfg.max_connectivity_checks

    for idx in order:
        if len(dropped) >= target:
            break
        u, v = int(edge_array[idx, 0]), int(edge_array[idx, 1])
        if len(adj[u]) < 2 or len(adj[v]) < 2:
            continue
        adj[u].discard(v)
        adj[v].discard(u)
        if _reachable(adj, u, v, cap):
            dropped.append((u, v))
        else:
            adj[u].add(v)
            adj[v].add(u)

    achieved = len(dropped)
    if achieved < target:
        logger.warning(
            "positive sampling shortfall: requested %d, achieved %d "
            "(remaining edges are bridges or would isolate a node)",
            target,
            achieved,
        )
    residual_pairs = {
        (u, int(v)) for u in range(g.node_count) for v in adj[u] if u < v
    }
    residual = Graph._from_pair_set(g.node_count, residual_pairs)
    pairs = np.array(dropped, dtype=np.int32).reshape(-1, 2)
    return PositiveSampleResult(
        residual=residual,
        positives=PairSet(pairs=pairs, label=1),
        requested=target,
        achieved=achieved,
    )


def _reachable(adj: list[set[int]], src: int, dst: int, cap: int | None) -> bool:
    """Breadth-first reachability; exhausting ``cap`` visits counts as no."""
    seen = {src}
    queue = deque([src])
    visited = 0
    while queue:
        node = queue.popleft()
        visited += 1
        if cap is not None and visited > cap:
            return False
        for nxt in adj[node]:
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def assemble_dataset(pos: PairSet, neg: PairSet) -> LabeledPairs:
    """Concatenate positives then negatives, each in enumeration order."""
    if pos.label != 1 or neg.label != 0:
        raise ValueError("assemble_dataset expects (positives, negatives)")
    overlap = pos.as_set() & neg.as_set()
    if overlap:
        sample = sorted(overlap)[:3]
        raise ValueError(f"pair(s) present in both sets, e.g. {sample}")
    u = np.concatenate([pos.pairs[:, 0], neg.pairs[:, 0]])
    v = np.concatenate([pos.pairs[:, 1], neg.pairs[:, 1]])
    label = np.concatenate(
        [np.ones(len(pos), dtype=np.int8), np.zeros(len(neg), dtype=np.int8)]
    )
    return LabeledPairs(u=u, v=v, label=label)


def _train_count(n: int, fraction: float) -> int:
    """floor + largest-remainder allocation between the two parts."""
    train = int(fraction * n)
    test = int((1.0 - fraction) * n)
    if train + test < n:
        train_rem = fraction * n - train
        test_rem = (1.0 - fraction) * n - test
        if train_rem >= test_rem:
            train += 1
    return train


def split_dataset(
    d: LabeledPairs,
    train_fraction: float = 0.8,
    stratified: bool = True,
    rng: np.random.Generator | None = None,
) -> LabeledPairs:
    """Tag rows train/test; row order is preserved so output is stable."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = rng if rng is not None else np.random.default_rng(0)
    tags = [""] * len(d)
    if stratified:
        strata = [np.flatnonzero(d.label == c) for c in (0, 1) if np.any(d.label == c)]
    else:
        strata = [np.arange(len(d))]
    for stratum in strata:
        if len(stratum) < 2:
            raise ValueError(f"stratum with {len(stratum)} row(s) cannot be split")
        n_train = _train_count(len(stratum), train_fraction)
        shuffled = stratum[rng.permutation(len(stratum))]
        for i in shuffled[:n_train]:
            tags[int(i)] = TRAIN
        for i in shuffled[n_train:]:
            tags[int(i)] = TEST
    return replace(d, split=tags)


def write_pairs_csv(d: LabeledPairs, index: NodeIndex, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source_label", "target_label", "label", "split"])
        for i in range(len(d)):
            writer.writerow(
                [
                    index.id_to_label[d.u[i]],
                    index.id_to_label[d.v[i]],
                    int(d.label[i]),
                    d.split[i],
                ]
            )


def read_pairs_csv(path: str | Path, index: NodeIndex) -> LabeledPairs:
    us, vs, labels, splits = [], [], [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["source_label", "target_label", "label", "split"]:
            raise ValueError(f"unexpected pairs CSV header: {header}")
        for row in reader:
            us.append(index.id_for(row[0]))
            vs.append(index.id_for(row[1]))
            labels.append(int(row[2]))
            splits.append(row[3])
    return LabeledPairs(
        u=np.array(us, dtype=np.int32),
        v=np.array(vs, dtype=np.int32),
        label=np.array(labels, dtype=np.int8),
        split=splits,
    )
