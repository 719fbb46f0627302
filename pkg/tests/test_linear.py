import numpy as np
import pytest

from phenolink.models import LinearModel, LogisticConfig, train_logistic
from phenolink.models.linear import logistic_loss_and_grad


def finite_difference(fun, x, h=1e-6):
    grad = np.zeros_like(x)
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (fun(x + step) - fun(x - step)) / (2 * h)
    return grad


class TestLoss:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 5))
        y = (rng.random(40) < 0.5).astype(float)
        w = rng.uniform(0.5, 2.0, size=40)
        for _ in range(20):
            params = rng.normal(size=6)
            _, grad = logistic_loss_and_grad(params, X, y, w, l2=0.7)
            numeric = finite_difference(
                lambda p: logistic_loss_and_grad(p, X, y, w, l2=0.7)[0], params
            )
            rel = np.linalg.norm(grad - numeric) / max(np.linalg.norm(numeric), 1e-12)
            assert rel < 1e-6

    def test_bias_not_regularized(self):
        X = np.zeros((3, 2))
        y = np.array([1.0, 1.0, 1.0])
        w = np.ones(3)
        params = np.array([0.0, 0.0, 5.0])
        loss_big_l2, _ = logistic_loss_and_grad(params, X, y, w, l2=100.0)
        loss_no_l2, _ = logistic_loss_and_grad(params, X, y, w, l2=0.0)
        assert loss_big_l2 == pytest.approx(loss_no_l2)


class TestTraining:
    def test_one_dimensional_separation(self):
        X = np.array([[-1.0], [1.0], [-1.0], [1.0]])
        y = np.array([0, 1, 0, 1])
        model = train_logistic(X, y, cfg=LogisticConfig(l2=1e-4))
        assert model.weights[0] > 0
        assert model.predict_proba(np.array([[1.0]]))[0] > 0.5
        assert model.predict_proba(np.array([[-1.0]]))[0] < 0.5

    def test_zero_model_scores_half(self):
        model = LinearModel(weights=np.zeros(3), bias=0.0)
        scores = model.predict_proba(np.zeros((5, 3)))
        assert np.allclose(scores, 0.5)

    def test_convergence_reported(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(100, 4))
        y = (X[:, 0] > 0).astype(int)
        model = train_logistic(X, y, cfg=LogisticConfig(l2=1.0, tol=1e-6))
        assert model.fit_info["converged"]
        assert model.fit_info["grad_norm"] <= 1e-6

    def test_sample_weights_shift_decision(self):
        X = np.array([[0.0], [0.0]])
        y = np.array([0, 1])
        heavy_pos = train_logistic(X, y, sample_weight=np.array([1.0, 9.0]),
                                   cfg=LogisticConfig(l2=1e-6))
        assert heavy_pos.predict_proba(np.array([[0.0]]))[0] > 0.5

    def test_non_finite_features_rejected(self):
        X = np.array([[np.nan]])
        with pytest.raises(ValueError, match="finite"):
            train_logistic(X, np.array([1]))

    def test_dimension_mismatch_on_scoring(self):
        model = LinearModel(weights=np.zeros(3), bias=0.0)
        with pytest.raises(ValueError, match="dimension"):
            model.predict_proba(np.zeros((2, 4)))

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(60, 3))
        y = (rng.random(60) < 0.4).astype(int)
        a = train_logistic(X, y)
        b = train_logistic(X, y)
        assert np.array_equal(a.weights, b.weights)
        assert a.bias == b.bias
