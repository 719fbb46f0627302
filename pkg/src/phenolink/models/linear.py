"""Logistic regression fit by limited-memory quasi-Newton iterations.

The objective is the row-weighted negative log-likelihood plus an L2
penalty on the weights (bias excluded). Search directions come from the
standard two-loop recursion over the last 10 (s, y) pairs; step sizes
from Armijo backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import PhenolinkError
from .common import check_binary_labels, check_feature_matrix, sigmoid


class ConvergenceError(PhenolinkError):
    """Line search failed before reaching tolerance; carries the iterate."""

    def __init__(self, message: str, model: "LinearModel"):
        super().__init__(message)
        self.model = model


@dataclass(frozen=True)
class LogisticConfig:
    max_iter: int = 100
    tol: float = 1e-6  # on the gradient 2-norm
    l2: float = 1.0
    history: int = 10

    def __post_init__(self) -> None:
        if self.max_iter < 1 or self.tol <= 0 or self.l2 < 0 or self.history < 1:
            raise ValueError("invalid logistic configuration")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    fit_info: dict = field(default_factory=dict)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_feature_matrix(X, expected_dim=len(self.weights))
        return sigmoid(X @ self.weights + self.bias)

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": float(self.bias)}

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        return cls(weights=np.array(d["weights"], dtype=np.float64), bias=float(d["bias"]))


def logistic_loss_and_grad(
    params: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray]:
    """Loss and gradient at params = [weights..., bias].

    loss = sum_i w_i * (softplus(z_i) - y_i z_i) + l2/2 * ||weights||^2
    with z = X @ weights + bias. Kept as a standalone function so tests
    can check the gradient against finite differences.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # softplus(z) = log(1 + e^z), stable on both tails
    softplus = np.logaddexp(0.0, z)
    loss = float(np.sum(sample_weight * (softplus - y * z)) + 0.5 * l2 * (w @ w))
    residual = sample_weight * (sigmoid(z) - y)
    grad = np.empty_like(params)
    grad[:-1] = X.T @ residual + l2 * w
    grad[-1] = residual.sum()
    return loss, grad


def _backtracking(fun, x, direction, f0, g0, max_halvings=30):
    """Armijo backtracking; returns (step, f_new) or None."""
    slope = float(g0 @ direction)
    if slope >= 0:
        return None
    step = 1.0
    for _ in range(max_halvings):
        f_new = fun(x + step * direction)
        if f_new <= f0 + 1e-4 * step * slope:
            return step, f_new
        step *= 0.5
    return None


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    cfg: LogisticConfig = LogisticConfig(),
) -> LinearModel:
    """Minimize the regularized weighted log-loss; reports convergence in
    ``fit_info``. Raises :class:`ConvergenceError` (iterate attached) if
    the line search stalls away from tolerance.
    """
    X = check_feature_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    if sample_weight is None:
        sample_weight = np.ones(len(y))
    sample_weight = np.asarray(sample_weight, dtype=np.float64)

    def value(params):
        return logistic_loss_and_grad(params, X, y, sample_weight, cfg.l2)[0]

    x = np.zeros(X.shape[1] + 1)
    f, g = logistic_loss_and_grad(x, X, y, sample_weight, cfg.l2)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    iteration = 0
    converged = False

    while iteration < cfg.max_iter:
        grad_norm = float(np.linalg.norm(g))
        if grad_norm <= cfg.tol:
            converged = True
            break
        direction = _two_loop_direction(g, s_hist, y_hist, rho_hist)
        result = _backtracking(value, x, direction, f, g)
        if result is None and s_hist:
            # quasi-Newton direction failed; restart from steepest descent
            s_hist.clear(), y_hist.clear(), rho_hist.clear()
            direction = -g / grad_norm
            result = _backtracking(value, x, direction, f, g)
        if result is None:
            model = LinearModel(
                weights=x[:-1].copy(),
                bias=float(x[-1]),
                fit_info={"converged": False, "iterations": iteration, "grad_norm": grad_norm},
            )
            raise ConvergenceError(
                f"line search failed at iteration {iteration} (grad norm {grad_norm:.3g})",
                model,
            )
        step, f_new = result
        x_new = x + step * direction
        _, g_new = logistic_loss_and_grad(x_new, X, y, sample_weight, cfg.l2)
        s, yk = x_new - x, g_new - g
        sy = float(s @ yk)
        if sy > 1e-12:
            s_hist.append(s)
            y_hist.append(yk)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > cfg.history:
                s_hist.pop(0), y_hist.pop(0), rho_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        iteration += 1

    grad_norm = float(np.linalg.norm(g))
    converged = converged or grad_norm <= cfg.tol
    return LinearModel(
        weights=x[:-1].copy(),
        bias=float(x[-1]),
        fit_info={"converged": converged, "iterations": iteration, "grad_norm": grad_norm},
    )


def _two_loop_direction(g, s_hist, y_hist, rho_hist) -> np.ndarray:
    """Implicit inverse-Hessian product over the stored (s, y) pairs."""
    q = -g.copy()
    if not s_hist:
        return q
    alphas = []
    for s, yk, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * yk
    s_last, y_last = s_hist[-1], y_hist[-1]
    q *= float(s_last @ y_last) / float(y_last @ y_last)
    for (s, yk, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * float(yk @ q)
        q += (a - b) * s
    return q
