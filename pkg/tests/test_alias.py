import numpy as np
import pytest

from phenolink.embed import AliasTable, sample_alias

# chi-square critical value, df=3, alpha=0.001
CHI2_CRIT_DF3 = 16.266


class TestConstruction:
    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            AliasTable.from_weights(np.array([]))
        with pytest.raises(ValueError):
            AliasTable.from_weights(np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            AliasTable.from_weights(np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            AliasTable.from_weights(np.array([1.0, np.inf]))

    def test_prob_entries_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            table = AliasTable.from_weights(rng.random(int(rng.integers(1, 40))) + 1e-9)
            assert np.all(table.prob >= 0.0)
            assert np.all(table.prob <= 1.0)

    def test_reconstruction_matches_normalized_weights(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            k = int(rng.integers(1, 50))
            weights = rng.random(k) + 1e-12
            table = AliasTable.from_weights(weights)
            expected = weights / weights.sum()
            assert np.max(np.abs(table.probabilities() - expected)) < 1e-12


class TestSampling:
    def test_single_category(self):
        table = AliasTable.from_weights(np.array([2.5]))
        rng = np.random.default_rng(0)
        assert all(sample_alias(table, rng) == 0 for _ in range(100))

    def test_one_three_frequency(self):
        table = AliasTable.from_weights(np.array([1.0, 3.0]))
        rng = np.random.default_rng(7)
        n = 100_000
        hits = sum(sample_alias(table, rng) for _ in range(n))
        p = 0.75
        sigma = np.sqrt(p * (1 - p) / n)
        assert abs(hits / n - p) <= 3 * sigma

    def test_uniform_chi_square(self):
        table = AliasTable.from_weights(np.array([1.0, 1.0, 1.0, 1.0]))
        rng = np.random.default_rng(11)
        n = 100_000
        counts = np.zeros(4)
        for _ in range(n):
            counts[sample_alias(table, rng)] += 1
        expected = n / 4
        chi2 = float(np.sum((counts - expected) ** 2 / expected))
        assert chi2 < CHI2_CRIT_DF3
