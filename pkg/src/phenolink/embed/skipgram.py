"""Skip-gram training with negative sampling over a walk corpus.

For every walk position i and every other position j within the context
window, one positive stochastic update is applied to the (center k_i,
context k_j) vector pair, followed by ``negatives_per_positive`` noise
updates with noise nodes drawn proportionally to degree^noise_exponent.
The step size decays linearly from ``initial_step_size`` down to
1/10000th of it over the full schedule of updates (all epochs).

``softmax_probability_exact`` is the slow exact softmax this objective
approximates; it exists for verification, not training.

The hot loop is a compiled kernel; :func:`pair_loss_and_gradients` is the
same per-pair objective in plain numpy for gradient verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .. import PhenolinkError
from .alias import AliasTable
from .walks import WalkCorpus

_MAX_LOGIT = 30.0  # inner products are clamped to +-30 before sigmoid


class TrainingError(PhenolinkError):
    """Non-finite update encountered; carries the offending pair index."""

    def __init__(self, pair_index: int):
        super().__init__(f"non-finite update at pair {pair_index}")
        self.pair_index = pair_index


@dataclass(frozen=True)
class SkipGramConfig:
    dimensions: int = 128
    window: int = 10
    negatives_per_positive: int = 5
    epochs: int = 5
    initial_step_size: float = 0.025
    noise_exponent: float = 0.75
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.dimensions < 1:
            raise ValueError("dimensions must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives_per_positive < 1:
            raise ValueError("negatives_per_positive must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.initial_step_size <= 0:
            raise ValueError("initial_step_size must be positive")


@dataclass
class EmbeddingMatrix:
    """Per-node input vectors (the published embedding) plus the trainer's
    context vectors; ``epoch_losses`` records the mean pair loss per epoch."""

    input_vectors: np.ndarray  # (N, D) float64
    context_vectors: np.ndarray  # (N, D) float64
    epoch_losses: list[float] | None = None

    @property
    def node_count(self) -> int:
        return self.input_vectors.shape[0]

    @property
    def dimensions(self) -> int:
        return self.input_vectors.shape[1]


def pair_loss_and_gradients(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Negative-sampling loss for one (center, context) pair.

    loss = -log s(c.x) - sum_k log s(-c.n_k), with s the logistic sigmoid.
    Returns (loss, d/d center, d/d context, d/d negatives). No logit
    clamping here: this is the reference form the kernel is checked
    against by finite differences.
    """
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64).reshape(-1, len(center))
    pos_logit = float(center @ context)
    neg_logits = negatives @ center
    sig_pos = 1.0 / (1.0 + np.exp(-pos_logit))
    sig_neg = 1.0 / (1.0 + np.exp(-neg_logits))
    # -log s(z) = logaddexp(0, -z), stable for any logit
    loss = float(np.logaddexp(0.0, -pos_logit) + np.sum(np.logaddexp(0.0, neg_logits)))
    g_center = (sig_pos - 1.0) * context + sig_neg @ negatives
    g_context = (sig_pos - 1.0) * center
    g_negatives = sig_neg[:, None] * center[None, :]
    return float(loss), g_center, g_context, g_negatives


def softmax_probability_exact(emb: EmbeddingMatrix, center: int, context: int) -> float:
    """Exact softmax p(context | center) over the whole vocabulary."""
    logits = emb.context_vectors @ emb.input_vectors[center]
    logits = logits - logits.max()
    weights = np.exp(logits)
    return float(weights[context] / weights.sum())


@njit(cache=False, fastmath=True)
def _sgns_epoch(
    walks,
    lengths,
    emb,
    ctx,
    window,
    negatives,
    noise_prob,
    noise_alias,
    alpha0,
    alpha_min,
    pair_start,
    total_pairs,
    seed,
):  # pragma: no cover - exercised via train_skipgram
    np.random.seed(seed)
    dims = emb.shape[1]
    k_noise = noise_prob.shape[0]
    buf = np.empty(dims)
    loss_sum = 0.0
    t = pair_start
    denom = total_pairs - 1 if total_pairs > 1 else 1
    for w in range(walks.shape[0]):
        length = lengths[w]
        for i in range(length):
            ci = walks[w, i]
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > length - 1:
                hi = length - 1
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                co = walks[w, j]
                alpha = alpha0 + (alpha_min - alpha0) * (t / denom)
                for d in range(dims):
                    buf[d] = 0.0
                # positive update on (ci, co)
                f = 0.0
                for d in range(dims):
                    f += emb[ci, d] * ctx[co, d]
                if f > _MAX_LOGIT:
                    f = _MAX_LOGIT
                elif f < -_MAX_LOGIT:
                    f = -_MAX_LOGIT
                sig = 1.0 / (1.0 + np.exp(-f))
                g = (1.0 - sig) * alpha
                if not np.isfinite(g):
                    return t, loss_sum, False
                loss_sum += -np.log(sig)
                for d in range(dims):
                    buf[d] += g * ctx[co, d]
                    ctx[co, d] += g * emb[ci, d]
                # noise updates; a draw equal to the true context is skipped
                for s in range(negatives):
                    kk = int(np.random.random() * k_noise)
                    if kk >= k_noise:
                        kk = k_noise - 1
                    if np.random.random() >= noise_prob[kk]:
                        kk = noise_alias[kk]
                    if kk == co:
                        continue
                    f = 0.0
                    for d in range(dims):
                        f += emb[ci, d] * ctx[kk, d]
                    if f > _MAX_LOGIT:
                        f = _MAX_LOGIT
                    elif f < -_MAX_LOGIT:
                        f = -_MAX_LOGIT
                    sig_n = 1.0 / (1.0 + np.exp(f))  # sigmoid(-f)
                    g = (sig_n - 1.0) * alpha  # = (0 - sigmoid(f)) * alpha
                    if not np.isfinite(g):
                        return t, loss_sum, False
                    loss_sum += -np.log(sig_n)
                    for d in range(dims):
                        buf[d] += g * ctx[kk, d]
                        ctx[kk, d] += g * emb[ci, d]
                for d in range(dims):
                    emb[ci, d] += buf[d]
                t += 1
    return t, loss_sum, True


def count_window_pairs(lengths: np.ndarray, window: int) -> int:
    """Number of (i, j) update pairs one pass over the corpus performs."""
    total = 0
    cache: dict[int, int] = {}
    for length in lengths:
        length = int(length)
        if length not in cache:
            pairs = 0
            for i in range(length):
                pairs += min(i + window, length - 1) - max(0, i - window)
            cache[length] = pairs
        total += cache[length]
    return total


def train_skipgram(
    corpus: WalkCorpus,
    cfg: SkipGramConfig,
    rng: np.random.Generator | None = None,
    degrees: np.ndarray | None = None,
) -> EmbeddingMatrix:
    """Train input/context vectors over the walk corpus (single worker).

    Noise weights are degree^noise_exponent when ``degrees`` is given
    (the pipeline passes residual-graph degrees); otherwise corpus
    occurrence counts stand in for degrees. Deterministic for a fixed
    corpus, config and rng seed.
    """
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    n = corpus.node_count
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)

    if degrees is not None:
        base = np.asarray(degrees, dtype=np.float64)
        if len(base) != n:
            raise ValueError("degrees length must equal corpus.node_count")
    else:
        base = np.bincount(
            corpus.walks[corpus.walks >= 0].ravel(), minlength=n
        ).astype(np.float64)
    weights = np.power(base, cfg.noise_exponent, where=base > 0, out=np.zeros_like(base))
    if weights.sum() <= 0:
        weights = np.ones(n, dtype=np.float64)
    noise = AliasTable.from_weights(weights)

    emb = (rng.random((n, cfg.dimensions)) - 0.5) / cfg.dimensions
    ctx = np.zeros((n, cfg.dimensions), dtype=np.float64)

    pairs_per_epoch = count_window_pairs(corpus.lengths, cfg.window)
    total_pairs = pairs_per_epoch * cfg.epochs
    alpha_min = cfg.initial_step_size / 10000.0
    epoch_seeds = rng.integers(0, 2**31 - 1, size=cfg.epochs)

    epoch_losses: list[float] = []
    pair_t = 0
    for epoch in range(cfg.epochs):
        # walks arrive grouped by start node; a seeded reshuffle per epoch
        # decorrelates consecutive updates
        order = rng.permutation(len(corpus.walks))
        pair_t, loss_sum, ok = _sgns_epoch(
            corpus.walks[order],
            corpus.lengths[order],
            emb,
            ctx,
            cfg.window,
            cfg.negatives_per_positive,
            noise.prob,
            noise.alias,
            cfg.initial_step_size,
            alpha_min,
            pair_t,
            total_pairs,
            int(epoch_seeds[epoch]),
        )
        if not ok:
            raise TrainingError(pair_t)
        epoch_losses.append(loss_sum / max(pairs_per_epoch, 1))

    if not (np.all(np.isfinite(emb)) and np.all(np.isfinite(ctx))):
        raise TrainingError(pair_t)
    return EmbeddingMatrix(input_vectors=emb, context_vectors=ctx, epoch_losses=epoch_losses)
