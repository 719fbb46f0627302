"""Shared helpers: random graph builders and independent oracles.

The oracles here deliberately re-derive results by other means (dense
matrices, union-find, pairwise counting) so library bugs cannot hide in
tests that reuse the implementation under test.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from phenolink.graph import Graph

REPO_ROOT = Path(__file__).resolve().parent.parent
TOY_TSV = REPO_ROOT / "data" / "toy_annotations.tsv"


def random_edge_set(rng: np.random.Generator, n: int, extra: int) -> set[tuple[int, int]]:
    """Random connected simple graph: a random spanning tree plus extras."""
    edges: set[tuple[int, int]] = set()
    for u in range(1, n):
        v = int(rng.integers(0, u))
        edges.add((v, u))
    for _ in range(extra):
        u, v = (int(x) for x in rng.integers(0, n, 2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return edges


def random_graph(rng: np.random.Generator, n: int, extra: int) -> Graph:
    return Graph.from_edges(n, random_edge_set(rng, n, extra))


def dense_adjacency(g: Graph) -> np.ndarray:
    """Materialized N x N boolean adjacency matrix (small graphs only)."""
    n = g.node_count
    dense = np.zeros((n, n), dtype=bool)
    for u in range(n):
        for v in g.neighbors(u):
            dense[u, v] = True
    return dense


def dense_non_edges(g: Graph) -> set[tuple[int, int]]:
    """Strict-upper-triangle zero scan of the dense adjacency matrix."""
    dense = dense_adjacency(g)
    n = g.node_count
    return {(u, v) for u in range(n) for v in range(u + 1, n) if not dense[u, v]}


class UnionFind:
    """Independent connectivity oracle."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def component_count(self) -> int:
        return len({self.find(x) for x in range(len(self.parent))})


@pytest.fixture(scope="session")
def toy_tsv_path() -> Path:
    assert TOY_TSV.is_file(), "bundled toy dataset missing; run python -m phenolink.toydata"
    return TOY_TSV
