"""Edge features from node-pair embeddings, and the embedding text format.

File format: first line ``N D``, then one line per node in id order:
``label v1 v2 ... vD`` space-separated at full precision.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path

import numpy as np

from .skipgram import EmbeddingMatrix


class EdgeOperator(str, Enum):
    HADAMARD = "hadamard"
    AVERAGE = "average"
    L1 = "l1"
    L2 = "l2"
    CONCAT = "concat"


def edge_features(
    emb: EmbeddingMatrix, u: int, v: int, op: EdgeOperator = EdgeOperator.HADAMARD
) -> np.ndarray:
    """Combine the input vectors of u and v into one pair feature vector.

    Symmetric in (u, v) for all operators; concat orders by min id first.
    """
    return edge_feature_matrix(emb, np.array([u]), np.array([v]), op)[0]


def edge_feature_matrix(
    emb: EmbeddingMatrix,
    us: np.ndarray,
    vs: np.ndarray,
    op: EdgeOperator = EdgeOperator.HADAMARD,
) -> np.ndarray:
    op = EdgeOperator(op)
    a = emb.input_vectors[np.asarray(us, dtype=np.int64)]
    b = emb.input_vectors[np.asarray(vs, dtype=np.int64)]
    if op is EdgeOperator.HADAMARD:
        return a * b
    if op is EdgeOperator.AVERAGE:
        return (a + b) / 2.0
    if op is EdgeOperator.L1:
        return np.abs(a - b)
    if op is EdgeOperator.L2:
        return (a - b) ** 2
    # concat: canonical order, min id first
    lo = np.minimum(us, vs).astype(np.int64)
    hi = np.maximum(us, vs).astype(np.int64)
    return np.concatenate(
        [emb.input_vectors[lo], emb.input_vectors[hi]], axis=1
    )


def write_embeddings(emb: EmbeddingMatrix, labels: list[str], path: str | Path) -> None:
    if len(labels) != emb.node_count:
        raise ValueError("label count must equal node count")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{emb.node_count} {emb.dimensions}\n")
        for i, label in enumerate(labels):
            if " " in label:
                raise ValueError(f"label contains a space: {label!r}")
            values = " ".join(repr(float(x)) for x in emb.input_vectors[i])
            fh.write(f"{label} {values}\n")


def read_embeddings(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Load (labels, N x D matrix); validates the declared dimensions."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("embedding file must start with 'N D'")
        n, d = int(header[0]), int(header[1])
        labels: list[str] = []
        matrix = np.empty((n, d), dtype=np.float64)
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"embedding row {i} has {len(parts) - 1} values, expected {d}")
            labels.append(parts[0])
            matrix[i] = [float(x) for x in parts[1:]]
    return labels, matrix
