import numpy as np
import pytest

from phenolink.embed import (
    EdgeOperator,
    EmbeddingMatrix,
    edge_feature_matrix,
    edge_features,
    read_embeddings,
    write_embeddings,
)


def embedding(rows: list[list[float]]) -> EmbeddingMatrix:
    arr = np.array(rows, dtype=np.float64)
    return EmbeddingMatrix(input_vectors=arr, context_vectors=np.zeros_like(arr))


class TestOperators:
    def test_hadamard(self):
        emb = embedding([[1, 2], [3, 4]])
        assert list(edge_features(emb, 0, 1, EdgeOperator.HADAMARD)) == [3, 8]

    def test_average(self):
        emb = embedding([[1, 2], [3, 4]])
        assert list(edge_features(emb, 0, 1, EdgeOperator.AVERAGE)) == [2, 3]

    def test_l1(self):
        emb = embedding([[1, 5], [4, 1]])
        assert list(edge_features(emb, 0, 1, EdgeOperator.L1)) == [3, 4]

    def test_l2_elementwise_squared(self):
        emb = embedding([[1, 5], [4, 1]])
        assert list(edge_features(emb, 0, 1, EdgeOperator.L2)) == [9, 16]

    def test_concat_canonical_order(self):
        emb = embedding([[1, 2], [3, 4]])
        forward = edge_features(emb, 0, 1, EdgeOperator.CONCAT)
        backward = edge_features(emb, 1, 0, EdgeOperator.CONCAT)
        assert list(forward) == [1, 2, 3, 4]
        assert np.array_equal(forward, backward)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(0)
        emb = EmbeddingMatrix(
            input_vectors=rng.normal(size=(10, 6)),
            context_vectors=np.zeros((10, 6)),
        )
        us = rng.integers(0, 10, size=30)
        vs = rng.integers(0, 10, size=30)
        for op in (EdgeOperator.HADAMARD, EdgeOperator.AVERAGE, EdgeOperator.L1, EdgeOperator.L2):
            assert np.array_equal(
                edge_feature_matrix(emb, us, vs, op), edge_feature_matrix(emb, vs, us, op)
            )

    def test_accepts_plain_strings(self):
        emb = embedding([[1, 2], [3, 4]])
        assert list(edge_features(emb, 0, 1, "hadamard")) == [3, 8]


class TestEmbeddingFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        matrix = rng.normal(size=(4, 3))
        emb = EmbeddingMatrix(input_vectors=matrix, context_vectors=np.zeros_like(matrix))
        labels = ["HP:0000951", "ORPHA:763", "G1", "G2"]
        path = tmp_path / "emb.txt"
        write_embeddings(emb, labels, path)
        first_line = path.read_text(encoding="utf-8").splitlines()[0]
        assert first_line == "4 3"
        got_labels, got = read_embeddings(path)
        assert got_labels == labels
        assert np.array_equal(got, matrix)  # full-precision decimal survives

    def test_dimension_validation(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 3\nA 1.0 2.0 3.0\nB 1.0 2.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="values"):
            read_embeddings(path)

    def test_label_with_space_rejected(self, tmp_path):
        emb = embedding([[1.0]])
        with pytest.raises(ValueError, match="space"):
            write_embeddings(emb, ["bad label"], tmp_path / "x.txt")

    def test_label_count_checked(self, tmp_path):
        emb = embedding([[1.0], [2.0]])
        with pytest.raises(ValueError):
            write_embeddings(emb, ["only-one"], tmp_path / "x.txt")
