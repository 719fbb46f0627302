"""Two-hidden-layer perceptron: rectifier hidden units, sigmoid output,
trained with mini-batch backpropagation and Adam updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import PhenolinkError
from .common import check_binary_labels, check_feature_matrix, sigmoid


class TrainingDivergedError(PhenolinkError):
    pass


@dataclass(frozen=True)
class MlpConfig:
    hidden: tuple[int, ...] = (64, 32)
    step_size: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 20
    batch_size: int = 32

    def __post_init__(self) -> None:
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise ValueError("hidden sizes must be positive")
        if self.step_size <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("invalid mlp configuration")


@dataclass
class MlpModel:
    weights: list[np.ndarray]  # per layer, (fan_in, fan_out)
    biases: list[np.ndarray]
    fit_info: dict = field(default_factory=dict)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def forward(self, X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Returns (hidden activations incl. input, output probabilities)."""
        acts = [X]
        a = X
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.maximum(a @ w + b, 0.0)
            acts.append(a)
        logits = (a @ self.weights[-1] + self.biases[-1]).ravel()
        return acts, sigmoid(logits)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_feature_matrix(X, expected_dim=self.weights[0].shape[0])
        return self.forward(X)[1]

    def to_dict(self) -> dict:
        return {
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        return cls(
            weights=[np.array(w, dtype=np.float64) for w in d["weights"]],
            biases=[np.array(b, dtype=np.float64) for b in d["biases"]],
        )


def init_mlp(
    input_dim: int, hidden: tuple[int, ...], rng: np.random.Generator
) -> MlpModel:
    """Uniform init scaled by 1/sqrt(fan_in); zero biases."""
    sizes = [input_dim, *hidden, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases)


def mlp_loss_and_grads(
    model: MlpModel, X: np.ndarray, y: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean binary cross-entropy and its gradients for every parameter.

    Kept separate from the training loop so finite-difference tests can
    call it directly.
    """
    acts = [X]
    pre: list[np.ndarray] = []
    a = X
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        z = a @ w + b
        pre.append(z)
        a = np.maximum(z, 0.0)
        acts.append(a)
    logits = (a @ model.weights[-1] + model.biases[-1]).ravel()
    n = len(y)
    # mean softplus(z) - y*z, stable at both tails
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    delta = ((sigmoid(logits) - y) / n)[:, None]
    grads_w: list[np.ndarray] = [None] * len(model.weights)  # type: ignore[list-item]
    grads_b: list[np.ndarray] = [None] * len(model.biases)  # type: ignore[list-item]
    grads_w[-1] = acts[-1].T @ delta
    grads_b[-1] = delta.sum(axis=0)
    for layer in range(len(model.weights) - 2, -1, -1):
        delta = (delta @ model.weights[layer + 1].T) * (pre[layer] > 0.0)
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
    return loss, grads_w, grads_b


def train_mlp(
    X: np.ndarray,
    y: np.ndarray,
    cfg: MlpConfig = MlpConfig(),
    rng: np.random.Generator | None = None,
) -> MlpModel:
    X = check_feature_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    rng = rng if rng is not None else np.random.default_rng(0)
    model = init_mlp(X.shape[1], cfg.hidden, rng)

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    step = 0
    epoch_losses: list[float] = []
    n = X.shape[0]

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            loss, grads_w, grads_b = mlp_loss_and_grads(model, X[batch], y[batch])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch offset {start}"
                )
            loss_sum += loss * len(batch)
            step += 1
            bc1 = 1.0 - cfg.beta1**step
            bc2 = 1.0 - cfg.beta2**step
            for i in range(len(model.weights)):
                for grad, param, m, v in (
                    (grads_w[i], model.weights[i], m_w[i], v_w[i]),
                    (grads_b[i], model.biases[i], m_b[i], v_b[i]),
                ):
                    m *= cfg.beta1
                    m += (1.0 - cfg.beta1) * grad
                    v *= cfg.beta2
                    v += (1.0 - cfg.beta2) * grad * grad
                    param -= cfg.step_size * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
        epoch_losses.append(loss_sum / n)

    model.fit_info = {"epoch_losses": epoch_losses}
    return model
