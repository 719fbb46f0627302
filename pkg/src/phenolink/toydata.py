"""Bundled synthetic annotation data.

A bipartite planted-partition graph: phenotype and gene nodes are split
into matching blocks; within-block pairs connect with high probability,
cross-block pairs rarely. At the default sizes this yields roughly 600
nodes and 3,000 associations whose pair dataset mirrors the severe class
imbalance of real annotation graphs, while staying small enough for
tests and docs to run the whole pipeline in minutes without any
third-party data download.

The generator is deterministic; ``data/toy_annotations.tsv`` in the
repository is its exact output for the default arguments (a test keeps
them in sync).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import Graph, connected_components
from .ingest import AssociationList

DEFAULT_SEED = 20240601


def generate_toy_annotations(
    n_phenotypes: int = 300,
    n_genes: int = 300,
    blocks: int = 6,
    within_block_prob: float = 0.19,
    cross_block_prob: float = 0.002,
    seed: int = DEFAULT_SEED,
) -> AssociationList:
    """Phenotype-gene associations from a planted block structure.

    Every node is guaranteed at least one association, and the resulting
    graph is connected (deterministic repair edges are added if the
    random draw leaves stragglers).
    """
    if n_phenotypes % blocks or n_genes % blocks:
        raise ValueError("block count must divide both node counts")
    rng = np.random.default_rng(seed)
    pheno_block = np.arange(n_phenotypes) // (n_phenotypes // blocks)
    gene_block = np.arange(n_genes) // (n_genes // blocks)
    same_block = pheno_block[:, None] == gene_block[None, :]
    prob = np.where(same_block, within_block_prob, cross_block_prob)
    adjacency = rng.random((n_phenotypes, n_genes)) < prob

    # no node may end up without any association
    for i in np.flatnonzero(~adjacency.any(axis=1)):
        partner = int(np.flatnonzero(gene_block == pheno_block[i])[0])
        adjacency[i, partner] = True
    for j in np.flatnonzero(~adjacency.any(axis=0)):
        partner = int(np.flatnonzero(pheno_block == gene_block[j])[0])
        adjacency[partner, j] = True

    adjacency = _connect_components(adjacency, n_phenotypes, n_genes)

    pheno_labels = [f"P{i + 1:04d}" for i in range(n_phenotypes)]
    gene_labels = [f"G{j + 1:04d}" for j in range(n_genes)]
    records = [
        (pheno_labels[i], gene_labels[j])
        for i, j in np.argwhere(adjacency)
    ]
    return AssociationList(records=records, source_kind="HPO", target_kind="GENE")


def _connect_components(adjacency: np.ndarray, n_phenotypes: int, n_genes: int) -> np.ndarray:
    """Link any stray components to the main one via bipartite edges."""
    edges = [(int(i), n_phenotypes + int(j)) for i, j in np.argwhere(adjacency)]
    g = Graph.from_edges(n_phenotypes + n_genes, edges)
    labeling = connected_components(g)
    if labeling.component_count == 1:
        return adjacency
    main = labeling.component_id[0]
    for comp in range(labeling.component_count):
        if comp == main:
            continue
        members = np.flatnonzero(labeling.component_id == comp)
        phenos = members[members < n_phenotypes]
        if len(phenos):
            main_genes = np.flatnonzero(labeling.component_id[n_phenotypes:] == main)
            adjacency[int(phenos[0]), int(main_genes[0])] = True
        else:
            main_phenos = np.flatnonzero(labeling.component_id[:n_phenotypes] == main)
            adjacency[int(main_phenos[0]), int(members[0]) - n_phenotypes] = True
    return adjacency


def write_toy_annotations(path: str | Path, **kwargs) -> AssociationList:
    """Write the bundled TSV (header line included) and return the list."""
    assoc = generate_toy_annotations(**kwargs)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("phenotype\tgene\n")
        for source, target in assoc.records:
            fh.write(f"{source}\t{target}\n")
    return assoc


if __name__ == "__main__":  # regenerate the bundled file in place
    target = Path(__file__).resolve().parents[2] / "data" / "toy_annotations.tsv"
    target.parent.mkdir(parents=True, exist_ok=True)
    assoc = write_toy_annotations(target)
    print(f"wrote {len(assoc)} associations to {target}")
