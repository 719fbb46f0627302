import numpy as np
import pytest

from conftest import dense_non_edges, random_graph
from phenolink.graph import Graph, connected_components
from phenolink.ingest import NodeIndex
from phenolink.sampling import (
    LabeledPairs,
    PairSet,
    SamplingConfig,
    assemble_dataset,
    count_unconnected_pairs,
    enumerate_negative_pairs,
    read_pairs_csv,
    sample_positive_edges,
    split_dataset,
    write_pairs_csv,
)


def cfg(**kwargs) -> SamplingConfig:
    defaults = dict(positive_fraction=0.3, negative_count="all", rng_seed=0)
    defaults.update(kwargs)
    return SamplingConfig(**defaults)


class TestConfig:
    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            SamplingConfig(positive_fraction=1.0)
        with pytest.raises(ValueError):
            SamplingConfig(positive_fraction=0.0)

    def test_negative_count_validation(self):
        with pytest.raises(ValueError):
            SamplingConfig(negative_count=0)
        with pytest.raises(ValueError):
            SamplingConfig(negative_count="some")


class TestEnumerateNegatives:
    def test_triangle_has_none(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert len(enumerate_negative_pairs(g, cfg(), np.random.default_rng(0))) == 0

    def test_path_single_gap(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        neg = enumerate_negative_pairs(g, cfg(), np.random.default_rng(0))
        assert neg.as_set() == {(0, 2)}

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(2, 120))
            g = random_graph(rng, n, int(rng.integers(0, 2 * n)))
            neg = enumerate_negative_pairs(g, cfg(), np.random.default_rng(1))
            assert neg.as_set() == dense_non_edges(g)

    def test_sampled_subset_deterministic(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 60, 40)
        total = count_unconnected_pairs(g)
        k = total // 3
        first = enumerate_negative_pairs(g, cfg(negative_count=k), np.random.default_rng(42))
        second = enumerate_negative_pairs(g, cfg(negative_count=k), np.random.default_rng(42))
        assert np.array_equal(first.pairs, second.pairs)
        assert len(first) == k
        assert first.as_set() <= dense_non_edges(g)
        # enumeration order: lexicographically sorted
        order = np.lexsort((first.pairs[:, 1], first.pairs[:, 0]))
        assert np.array_equal(order, np.arange(len(first)))

    def test_oversized_request_reports_maximum(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        with pytest.raises(ValueError, match="1"):
            enumerate_negative_pairs(g, cfg(negative_count=2), np.random.default_rng(0))


class TestSamplePositives:
    def test_star_is_all_bridges(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        result = sample_positive_edges(g, cfg(positive_fraction=0.34), np.random.default_rng(0))
        assert result.achieved == 0
        assert result.shortfall == result.requested == 1

    def test_triangle_drop_one(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        result = sample_positive_edges(g, cfg(positive_fraction=0.34), np.random.default_rng(0))
        assert result.achieved == 1
        assert result.residual.edge_count == 2
        assert connected_components(result.residual).component_count == 1

    def test_four_cycle_only_one_droppable(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        result = sample_positive_edges(g, cfg(positive_fraction=0.5), np.random.default_rng(3))
        assert result.requested == 2
        assert result.achieved == 1  # residual path is all bridges

    def test_label_soundness(self):
        rng = np.random.default_rng(21)
        g = random_graph(rng, 50, 80)
        result = sample_positive_edges(g, cfg(positive_fraction=0.4), rng)
        for u, v in result.positives.pairs:
            assert g.has_edge(int(u), int(v))
            assert not result.residual.has_edge(int(u), int(v))
        neg = enumerate_negative_pairs(g, cfg(), rng)
        for u, v in neg.pairs[:200]:
            assert not g.has_edge(int(u), int(v))

    def test_safety_on_random_connected_graphs(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            n = int(rng.integers(5, 80))
            g = random_graph(rng, n, int(rng.integers(0, 2 * n)))
            before = connected_components(g).component_count
            result = sample_positive_edges(g, cfg(positive_fraction=0.5), rng)
            assert connected_components(result.residual).component_count == before
            assert int(result.residual.degrees().min()) >= 1

    def test_connectivity_check_cap_is_conservative(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        tight = cfg(positive_fraction=0.34, max_connectivity_checks=1)
        result = sample_positive_edges(g, tight, np.random.default_rng(0))
        assert result.achieved <= 1
        assert connected_components(result.residual).component_count == 1


class TestAssemble:
    def test_counts_and_rate(self):
        pos = PairSet(pairs=np.array([[0, 1]]), label=1)
        neg = PairSet(pairs=np.array([[0, 2], [1, 3], [2, 3]]), label=0)
        d = assemble_dataset(pos, neg)
        assert len(d) == 4
        assert d.positive_rate() == pytest.approx(0.25)
        assert list(d.label) == [1, 0, 0, 0]

    def test_empty_negatives(self):
        pos = PairSet(pairs=np.array([[0, 1], [1, 2]]), label=1)
        neg = PairSet(pairs=np.empty((0, 2)), label=0)
        d = assemble_dataset(pos, neg)
        assert list(d.label) == [1, 1]

    def test_overlap_rejected(self):
        pos = PairSet(pairs=np.array([[0, 1]]), label=1)
        neg = PairSet(pairs=np.array([[0, 1]]), label=0)
        with pytest.raises(ValueError, match="both sets"):
            assemble_dataset(pos, neg)


class TestSplit:
    def make_dataset(self, n_pos: int, n_neg: int) -> LabeledPairs:
        u = np.arange(n_pos + n_neg, dtype=np.int32)
        v = u + 1000
        label = np.array([1] * n_pos + [0] * n_neg, dtype=np.int8)
        return LabeledPairs(u=u, v=v, label=label)

    def test_stratified_counts(self):
        d = self.make_dataset(2, 8)
        out = split_dataset(d, 0.8, True, np.random.default_rng(0))
        train = [i for i, s in enumerate(out.split) if s == "train"]
        pos_in_train = int(out.label[train].sum())
        assert len(train) == 8
        assert pos_in_train in (1, 2)

    def test_five_rows_unstratified(self):
        d = self.make_dataset(5, 0)
        out = split_dataset(d, 0.8, False, np.random.default_rng(1))
        assert out.split.count("train") == 4
        assert out.split.count("test") == 1

    def test_same_seed_same_tags(self):
        d = self.make_dataset(5, 20)
        a = split_dataset(d, 0.8, True, np.random.default_rng(7))
        b = split_dataset(d, 0.8, True, np.random.default_rng(7))
        assert a.split == b.split

    def test_tiny_stratum_rejected(self):
        d = self.make_dataset(1, 9)
        with pytest.raises(ValueError, match="stratum"):
            split_dataset(d, 0.8, True, np.random.default_rng(0))

    def test_within_one_row_of_fraction_per_stratum(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            n_pos = int(rng.integers(2, 40))
            n_neg = int(rng.integers(2, 200))
            frac = float(rng.uniform(0.3, 0.9))
            d = self.make_dataset(n_pos, n_neg)
            out = split_dataset(d, frac, True, rng)
            for c, size in ((1, n_pos), (0, n_neg)):
                rows = np.flatnonzero(out.label == c)
                got = sum(1 for i in rows if out.split[i] == "train")
                assert abs(got - frac * size) <= 1.0

    def test_row_order_preserved(self):
        d = self.make_dataset(3, 7)
        out = split_dataset(d, 0.8, True, np.random.default_rng(2))
        assert np.array_equal(out.u, d.u)
        assert np.array_equal(out.label, d.label)


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        index = NodeIndex.from_labels(["HP:1", "HP:2", "G1", "G2"])
        d = LabeledPairs(
            u=np.array([0, 1], dtype=np.int32),
            v=np.array([2, 3], dtype=np.int32),
            label=np.array([1, 0], dtype=np.int8),
            split=["train", "test"],
        )
        path = tmp_path / "pairs.csv"
        write_pairs_csv(d, index, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "source_label,target_label,label,split"
        again = read_pairs_csv(path, index)
        assert np.array_equal(again.u, d.u)
        assert np.array_equal(again.v, d.v)
        assert np.array_equal(again.label, d.label)
        assert again.split == d.split
