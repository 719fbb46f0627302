import numpy as np
import pytest

from phenolink.models.binning import bin_matrix, compute_bin_edges
from phenolink.models.splitting import SplitDecision, find_best_split


def exhaustive_best_split(X, grad, hess, lam=1.0, min_samples_leaf=1):
    """All-thresholds oracle on the raw feature values (no binning)."""
    n, d = X.shape
    total_g, total_h = grad.sum(), hess.sum()
    parent = total_g**2 / (total_h + lam)
    best = None
    for f in range(d):
        uniq = np.unique(X[:, f])
        for threshold in (uniq[:-1] + uniq[1:]) / 2.0:
            left = X[:, f] < threshold
            nl = int(left.sum())
            if nl < min_samples_leaf or n - nl < min_samples_leaf:
                continue
            gl, hl = grad[left].sum(), hess[left].sum()
            gr, hr = total_g - gl, total_h - hl
            gain = gl**2 / (hl + lam) + gr**2 / (hr + lam) - parent
            if best is None or gain > best[3]:
                best = (f, None, float(threshold), float(gain))
    if best is None or best[3] <= 0.0:
        return None
    return best


class TestExamples:
    def test_first_boosting_round_threshold(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        p = 0.5  # base score margin 0 -> probability one half
        grad = p - y
        hess = np.full(4, p * (1 - p))
        binned, cuts = bin_matrix(X, 64)
        split = find_best_split(binned, cuts, grad, hess)
        assert split is not None
        assert 2.0 < split.threshold < 3.0

    def test_constant_feature_never_chosen(self):
        X = np.column_stack([np.ones(6), np.arange(6, dtype=float)])
        y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        grad = 0.5 - y
        hess = np.full(6, 0.25)
        binned, cuts = bin_matrix(X, 64)
        split = find_best_split(binned, cuts, grad, hess)
        assert split.feature == 1

    def test_only_constant_features_no_split(self):
        X = np.ones((5, 2))
        grad = np.array([0.5, -0.5, 0.5, -0.5, 0.5])
        hess = np.full(5, 0.25)
        binned, cuts = bin_matrix(X, 64)
        assert find_best_split(binned, cuts, grad, hess) is None

    def test_pure_node_no_split(self):
        X = np.arange(8, dtype=float).reshape(-1, 1)
        y = np.ones(8)
        grad = 0.5 - y
        hess = np.full(8, 0.25)
        binned, cuts = bin_matrix(X, 64)
        assert find_best_split(binned, cuts, grad, hess) is None

    def test_min_samples_leaf_respected(self):
        X = np.arange(6, dtype=float).reshape(-1, 1)
        y = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        grad = 0.5 - y
        hess = np.full(6, 0.25)
        binned, cuts = bin_matrix(X, 64)
        split = find_best_split(binned, cuts, grad, hess, min_samples_leaf=3)
        assert split is None or min(split.bin + 1, 6 - (split.bin + 1)) >= 3

    def test_tie_breaks_to_lowest_feature(self):
        col = np.array([0.0, 0.0, 1.0, 1.0])
        X = np.column_stack([col, col])
        grad = np.array([0.5, 0.5, -0.5, -0.5])
        hess = np.full(4, 0.25)
        binned, cuts = bin_matrix(X, 64)
        split = find_best_split(binned, cuts, grad, hess)
        assert split.feature == 0


class TestOracleAgreement:
    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            n = int(rng.integers(2, 64))
            d = int(rng.integers(1, 8))
            X = np.round(rng.normal(size=(n, d)), int(rng.integers(0, 3)))
            grad = rng.normal(size=n)
            hess = rng.uniform(0.01, 1.0, size=n)
            binned, cuts = bin_matrix(X, 64)
            ours = find_best_split(binned, cuts, grad, hess)
            oracle = exhaustive_best_split(X, grad, hess)
            if oracle is None:
                assert ours is None
            else:
                assert ours is not None
                assert ours.feature == oracle[0]
                assert ours.threshold == pytest.approx(oracle[2], abs=1e-12)
                assert ours.gain == pytest.approx(oracle[3], abs=1e-9)


class TestBinning:
    def test_few_uniques_get_exact_midpoints(self):
        col = np.array([3.0, 1.0, 2.0, 1.0])
        edges = compute_bin_edges(col, 64)
        assert list(edges) == [1.5, 2.5]

    def test_constant_column_has_no_cuts(self):
        assert len(compute_bin_edges(np.ones(10), 64)) == 0

    def test_many_uniques_capped(self):
        col = np.arange(1000, dtype=float)
        edges = compute_bin_edges(col, 64)
        assert len(edges) <= 63
        assert np.all(np.diff(edges) > 0)

    def test_cuts_fall_between_observed_values(self):
        rng = np.random.default_rng(3)
        col = rng.normal(size=500)
        edges = compute_bin_edges(col, 32)
        assert not np.isin(edges, col).any()
