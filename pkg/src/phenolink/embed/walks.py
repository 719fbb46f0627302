"""Second-order biased random walks over the residual graph.

The step distribution leaving node v depends on the previous node t:
an unnormalized weight of 1/p to return to t, 1 to move to a common
neighbor of t and v, and 1/q otherwise. One alias table is precomputed
per directed edge (t -> v), plus a uniform first-step table per node, so
each step is an O(1) draw.

Walk generation is reproducible independent of any worker fan-out: the
random stream for walks starting at node s derives from (seed, s), and
those uniforms are pre-drawn and consumed by a compiled kernel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..graph import Graph
from .alias import AliasTable, _build_alias_arrays


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 30
    walks_per_node: int = 200
    p: float = 1.0
    q: float = 1.0
    rng_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class TransitionTables:
    """Flattened alias tables in CSR layout.

    Node tables share the graph's offsets (category i of node v's table is
    its i-th sorted neighbor). The table of directed edge e, where e is the
    flat CSR position of (t -> v), covers adj(v) and lives at
    ``edge_prob[edge_offsets[e]:edge_offsets[e+1]]``. Alias entries are
    local category indices.
    """

    p: float
    q: float
    node_prob: np.ndarray
    node_alias: np.ndarray
    edge_offsets: np.ndarray
    edge_prob: np.ndarray
    edge_alias: np.ndarray

    def node_table(self, g: Graph, v: int) -> AliasTable:
        lo, hi = g.offsets[v], g.offsets[v + 1]
        if lo == hi:
            raise ValueError(f"node {v} has no neighbors")
        return AliasTable(prob=self.node_prob[lo:hi], alias=self.node_alias[lo:hi])

    def edge_table(self, g: Graph, t: int, v: int) -> AliasTable:
        e = _edge_index(g, t, v)
        lo, hi = self.edge_offsets[e], self.edge_offsets[e + 1]
        return AliasTable(prob=self.edge_prob[lo:hi], alias=self.edge_alias[lo:hi])


@dataclass
class WalkCorpus:
    """Fixed-width walk matrix; rows shorter than walk_length are padded
    with -1 and their true length recorded."""

    walks: np.ndarray  # (num_walks, walk_length) int32
    lengths: np.ndarray  # int32
    node_count: int

    def __len__(self) -> int:
        return len(self.walks)

    def walk(self, i: int) -> np.ndarray:
        return self.walks[i, : self.lengths[i]]

    def iter_walks(self):
        for i in range(len(self.walks)):
            yield self.walk(i)


def _edge_index(g: Graph, t: int, v: int) -> int:
    row = g.neighbors(t)
    pos = int(np.searchsorted(row, v))
    if pos >= len(row) or row[pos] != v:
        raise ValueError(f"({t},{v}) is not an edge")
    return int(g.offsets[t]) + pos


def build_transition_tables(g: Graph, p: float, q: float) -> TransitionTables:
    """Precompute first-step and second-order step distributions."""
    if g.edge_count < 1:
        raise ValueError("graph has no edges")
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    n = g.node_count
    degrees = g.degrees()
    directed = len(g.neighbor_ids)

    node_prob = np.ones(directed, dtype=np.float64)
    node_alias = np.zeros(directed, dtype=np.int32)
    for v in range(n):
        lo, hi = g.offsets[v], g.offsets[v + 1]
        if lo == hi:
            continue
        prob, alias = _build_alias_arrays(np.full(hi - lo, 1.0 / (hi - lo)))
        node_prob[lo:hi] = prob
        node_alias[lo:hi] = alias

    tails = np.repeat(np.arange(n, dtype=np.int32), degrees)
    edge_offsets = np.zeros(directed + 1, dtype=np.int64)
    np.cumsum(degrees[g.neighbor_ids], out=edge_offsets[1:])
    edge_prob = np.empty(edge_offsets[-1], dtype=np.float64)
    edge_alias = np.empty(edge_offsets[-1], dtype=np.int32)

    for e in range(directed):
        t = int(tails[e])
        v = int(g.neighbor_ids[e])
        adj_v = g.neighbors(v)
        adj_t = g.neighbors(t)
        pos = np.searchsorted(adj_t, adj_v)
        pos_clipped = np.minimum(pos, len(adj_t) - 1)
        is_common = adj_t[pos_clipped] == adj_v
        weights = np.where(is_common, 1.0, 1.0 / q)
        weights[adj_v == t] = 1.0 / p
        prob, alias = _build_alias_arrays(weights / weights.sum())
        lo, hi = edge_offsets[e], edge_offsets[e + 1]
        edge_prob[lo:hi] = prob
        edge_alias[lo:hi] = alias

    return TransitionTables(
        p=p,
        q=q,
        node_prob=node_prob,
        node_alias=node_alias,
        edge_offsets=edge_offsets,
        edge_prob=edge_prob,
        edge_alias=edge_alias,
    )


@njit(cache=False, nogil=True)
def _walk_kernel(
    offsets,
    nbrs,
    node_prob,
    node_alias,
    edge_off,
    edge_prob,
    edge_alias,
    start,
    uniforms,
    out,
    lengths,
):  # pragma: no cover - exercised via generate_walks
    num_walks, length = out.shape
    for w in range(num_walks):
        out[w, 0] = start
        deg = offsets[start + 1] - offsets[start]
        if deg == 0:
            lengths[w] = 1
            continue
        k = int(uniforms[w, 0, 0] * deg)
        if k >= deg:
            k = deg - 1
        slot = offsets[start] + k
        if uniforms[w, 0, 1] >= node_prob[slot]:
            k = node_alias[slot]
        e = offsets[start] + k
        cur = nbrs[e]
        out[w, 1] = cur
        steps = 2
        for t in range(2, length):
            deg = offsets[cur + 1] - offsets[cur]
            if deg == 0:
                break
            base = edge_off[e]
            k = int(uniforms[w, t - 1, 0] * deg)
            if k >= deg:
                k = deg - 1
            if uniforms[w, t - 1, 1] >= edge_prob[base + k]:
                k = edge_alias[base + k]
            e = offsets[cur] + k
            cur = nbrs[e]
            out[w, t] = cur
            steps += 1
        lengths[w] = steps


def generate_walks(
    g: Graph,
    tables: TransitionTables,
    cfg: WalkConfig,
    seed: int | None = None,
) -> WalkCorpus:
    """Start ``walks_per_node`` walks at every node of the graph.

    The stream seed defaults to ``cfg.rng_seed``. Results do not depend on
    ``cfg.workers`` because node s always consumes its own (seed, s)
    stream; workers only split the node list.
    """
    base_seed = cfg.rng_seed if seed is None else seed
    n = g.node_count
    wpn, length = cfg.walks_per_node, cfg.walk_length
    walks = np.full((n * wpn, length), -1, dtype=np.int32)
    lengths = np.zeros(n * wpn, dtype=np.int32)

    def run_node(s: int) -> None:
        rng = np.random.default_rng(np.random.SeedSequence([base_seed & 0xFFFFFFFF, s]))
        uniforms = rng.random((wpn, length - 1, 2))
        lo = s * wpn
        _walk_kernel(
            g.offsets,
            g.neighbor_ids,
            tables.node_prob,
            tables.node_alias,
            tables.edge_offsets,
            tables.edge_prob,
            tables.edge_alias,
            s,
            uniforms,
            walks[lo : lo + wpn],
            lengths[lo : lo + wpn],
        )

    if cfg.workers == 1:
        for s in range(n):
            run_node(s)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(run_node, range(n)))

    return WalkCorpus(walks=walks, lengths=lengths, node_count=n)
