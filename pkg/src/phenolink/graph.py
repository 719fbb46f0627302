"""Immutable undirected simple graph in compressed (CSR) adjacency form.

Every graph in the pipeline is built once and never mutated: edge removal
returns a new graph so the full graph (used for labeling) and the residual
graph (used for embedding) can coexist without leakage bugs. Adjacency is
a flat sorted neighbor array plus per-node offsets; ``has_edge`` is a
binary search, neighbor iteration is a slice.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ingest import AssociationList, NodeIndex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph. Each edge appears twice in ``neighbor_ids``
    (once per endpoint) but is counted once in ``edge_count``."""

    offsets: np.ndarray  # int64, length N+1
    neighbor_ids: np.ndarray  # int32, length 2M, sorted per node
    edge_count: int

    @property
    def node_count(self) -> int:
        return len(self.offsets) - 1

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build from (u, v) pairs; duplicates collapse, self-loops raise."""
        pairs: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop ({u},{u}) not allowed")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise IndexError(f"edge ({u},{v}) outside [0,{node_count})")
            pairs.add((u, v) if u < v else (v, u))
        return cls._from_pair_set(node_count, pairs)

    @classmethod
    def _from_pair_set(cls, node_count: int, pairs: set[tuple[int, int]]) -> "Graph":
        m = len(pairs)
        if m == 0:
            return cls(
                offsets=np.zeros(node_count + 1, dtype=np.int64),
                neighbor_ids=np.empty(0, dtype=np.int32),
                edge_count=0,
            )
        arr = np.array(sorted(pairs), dtype=np.int32)
        heads = np.concatenate([arr[:, 0], arr[:, 1]])
        tails = np.concatenate([arr[:, 1], arr[:, 0]])
        order = np.lexsort((tails, heads))
        heads, tails = heads[order], tails[order]
        offsets = np.zeros(node_count + 1, dtype=np.int64)
        np.add.at(offsets, heads + 1, 1)
        np.cumsum(offsets, out=offsets)
        return cls(offsets=offsets, neighbor_ids=tails, edge_count=m)

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of ``u`` (a read-only view)."""
        if not 0 <= u < self.node_count:
            raise IndexError(f"node id {u} out of range [0,{self.node_count})")
        return self.neighbor_ids[self.offsets[u] : self.offsets[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.node_count and 0 <= v < self.node_count):
            raise IndexError(f"node pair ({u},{v}) out of range [0,{self.node_count})")
        row = self.neighbor_ids[self.offsets[u] : self.offsets[u + 1]]
        pos = np.searchsorted(row, v)
        return pos < len(row) and row[pos] == v

    def edges(self) -> Iterable[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, in sorted order."""
        for u in range(self.node_count):
            row = self.neighbors(u)
            for v in row[np.searchsorted(row, u + 1) :]:
                yield u, int(v)


@dataclass
class ComponentLabeling:
    """Dense component ids, ordered by each component's smallest node id."""

    component_id: np.ndarray  # int32, length N
    component_count: int


@dataclass
class GraphStats:
    node_count: int
    edge_count: int
    kind_counts: dict[str, int]
    min_degree: int
    max_degree: int
    mean_degree: float
    degree_histogram: dict[int, int]
    connected_component_count: int

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "kind_counts": dict(self.kind_counts),
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "mean_degree": self.mean_degree,
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "connected_component_count": self.connected_component_count,
        }

    def to_text(self) -> str:
        lines = [
            "graph statistics",
            f"  nodes                {self.node_count}",
            f"  edges                {self.edge_count}",
        ]
        for kind, count in sorted(self.kind_counts.items()):
            lines.append(f"  nodes[{kind}]{' ' * max(1, 13 - len(kind))}{count}")
        lines += [
            f"  min degree           {self.min_degree}",
            f"  max degree           {self.max_degree}",
            f"  mean degree          {self.mean_degree:.4f}",
            f"  connected components {self.connected_component_count}",
        ]
        return "\n".join(lines)

    def histogram_rows(self) -> list[tuple[int, int]]:
        """(degree, count) rows for the two-column CSV export."""
        return sorted(self.degree_histogram.items())


def build_graph(assoc: AssociationList, index: NodeIndex) -> Graph:
    """Collapse duplicates, drop self-loops (with a counted warning)."""
    pairs: set[tuple[int, int]] = set()
    self_loops = 0
    for source, target in assoc.records:
        u = index.id_for(source)
        v = index.id_for(target)
        if u == v:
            self_loops += 1
            continue
        pairs.add((u, v) if u < v else (v, u))
    if self_loops:
        logger.warning("dropped %d self-loop association(s) at graph build", self_loops)
    return Graph._from_pair_set(len(index), pairs)


def connected_components(g: Graph) -> ComponentLabeling:
    """Label components by breadth-first traversal from the lowest node id."""
    n = g.node_count
    comp = np.full(n, -1, dtype=np.int32)
    next_id = 0
    for start in range(n):
        if comp[start] >= 0:
            continue
        comp[start] = next_id
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if comp[v] < 0:
                    comp[v] = next_id
                    queue.append(int(v))
        next_id += 1
    return ComponentLabeling(component_id=comp, component_count=next_id)


def remove_edges(g: Graph, edges: Sequence[tuple[int, int]]) -> Graph:
    """Return a new graph without the listed edges; the input is untouched.

    Every listed pair must be an existing edge.
    """
    removal: set[tuple[int, int]] = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if not g.has_edge(u, v):
            raise ValueError(f"cannot remove ({u},{v}): not an edge")
        removal.add((u, v) if u < v else (v, u))
    kept = {e for e in g.edges() if e not in removal}
    return Graph._from_pair_set(g.node_count, kept)


def graph_stats(g: Graph, index: NodeIndex | None = None) -> GraphStats:
    degs = g.degrees()
    if g.node_count == 0:
        hist: dict[int, int] = {}
        min_d = max_d = 0
        mean_d = 0.0
    else:
        values, counts = np.unique(degs, return_counts=True)
        hist = {int(d): int(c) for d, c in zip(values, counts)}
        min_d, max_d = int(degs.min()), int(degs.max())
        mean_d = 2.0 * g.edge_count / g.node_count
    kind_counts: dict[str, int] = {}
    if index is not None:
        for kind in index.kind_of:
            kind_counts[kind] = kind_counts.get(kind, 0) + 1
    return GraphStats(
        node_count=g.node_count,
        edge_count=g.edge_count,
        kind_counts=kind_counts,
        min_degree=min_d,
        max_degree=max_d,
        mean_degree=mean_d,
        degree_histogram=hist,
        connected_component_count=connected_components(g).component_count,
    )
