"""Imbalance-aware evaluation for binary link prediction.

Per-class precision/recall/F1 come straight from confusion counts;
aggregates come in three flavors: micro (pooled counts), macro
(unweighted class mean) and weighted (support-normalized class mean).
Ranking quality is AUROC (rank statistic, ties half-credited) and AUCPR
(step-interpolated average precision; linear PR interpolation is
deliberately avoided as optimistic). The averaging operations accept any
number of classes but the report pipeline exercises exactly two.

Degenerate denominators (no predicted positives, say) report the metric
as 0 and flag it, because such thresholds legitimately occur during
curve sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import PhenolinkError


class UndefinedMetricError(PhenolinkError):
    """A ranking metric needs a class that is absent from the labels."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def support(self) -> int:
        """Actual positives under this matrix's orientation."""
        return self.tp + self.fn

    def relabeled(self) -> "ConfusionMatrix":
        """Swap which class counts as positive."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    undefined: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
        }
        if self.undefined:
            d["undefined"] = list(self.undefined)
        return d


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def confusion_matrix(labels: np.ndarray, predictions: np.ndarray) -> ConfusionMatrix:
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape:
        raise ValueError("labels and predictions must have equal length")
    if not (np.all(np.isin(labels, (0, 1))) and np.all(np.isin(predictions, (0, 1)))):
        raise ValueError("labels and predictions must be binary 0/1")
    pos = labels == 1
    pred_pos = predictions == 1
    return ConfusionMatrix(
        tp=int(np.sum(pos & pred_pos)),
        fp=int(np.sum(~pos & pred_pos)),
        fn=int(np.sum(pos & ~pred_pos)),
        tn=int(np.sum(~pos & ~pred_pos)),
    )


def _ratio(num: int, den: int) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Precision, recall (sensitivity) and F1 for the positive orientation
    of ``cm``; zero denominators yield 0 with a flag."""
    precision, p_undef = _ratio(cm.tp, cm.tp + cm.fp)
    recall, r_undef = _ratio(cm.tp, cm.tp + cm.fn)
    if precision > 0 and recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    undefined = tuple(
        name for name, flag in (("precision", p_undef), ("recall", r_undef)) if flag
    )
    return ClassMetrics(
        precision=precision, recall=recall, f1=f1, support=cm.support, undefined=undefined
    )


def false_positive_rate(cm: ConfusionMatrix) -> float:
    return _ratio(cm.fp, cm.fp + cm.tn)[0]


def micro_average(cms: Sequence[ConfusionMatrix]) -> PRF:
    """Pooled-count averages: sum the per-class counts, then divide."""
    tp = sum(cm.tp for cm in cms)
    fp = sum(cm.fp for cm in cms)
    fn = sum(cm.fn for cm in cms)
    precision, _ = _ratio(tp, tp + fp)
    recall, _ = _ratio(tp, tp + fn)
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision > 0 and recall > 0
        else 0.0
    )
    return PRF(precision=precision, recall=recall, f1=f1)


def macro_average(per_class: Sequence[ClassMetrics]) -> PRF:
    """Unweighted arithmetic means; macro F1 is the mean of class F1s,
    not the F1 of macro precision/recall."""
    if not per_class:
        raise ValueError("macro_average needs at least one class")
    n = len(per_class)
    return PRF(
        precision=sum(m.precision for m in per_class) / n,
        recall=sum(m.recall for m in per_class) / n,
        f1=sum(m.f1 for m in per_class) / n,
    )


def weighted_average(
    per_class: Sequence[ClassMetrics], supports: Sequence[float] | None = None
) -> PRF:
    """Support-normalized class means: sum_c metric_c * support_c / total."""
    if not per_class:
        raise ValueError("weighted_average needs at least one class")
    if supports is None:
        supports = [m.support for m in per_class]
    total = float(sum(supports))
    if total <= 0:
        raise ValueError("supports must sum to a positive value")
    weights = [s / total for s in supports]
    return PRF(
        precision=sum(w * m.precision for w, m in zip(weights, per_class)),
        recall=sum(w * m.recall for w, m in zip(weights, per_class)),
        f1=sum(w * m.f1 for w, m in zip(weights, per_class)),
    )


def _check_scores(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise ValueError("labels and scores must have equal length")
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("labels must be binary 0/1")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return labels, scores


def _threshold_sweep(labels, scores) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative (tp, fp) after each distinct descending score threshold."""
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    distinct = np.flatnonzero(np.diff(sorted_scores)) if len(scores) > 1 else np.empty(0, int)
    boundaries = np.concatenate([distinct, [len(scores) - 1]]).astype(np.int64)
    tp = np.cumsum(sorted_labels)[boundaries]
    fp = (boundaries + 1) - tp
    return sorted_scores[boundaries], tp, fp


def auroc(labels, scores) -> tuple[float, np.ndarray]:
    """Rank-based AUROC (ties get half credit) plus ROC curve points.

    The trapezoid area over the returned points equals the rank statistic.
    """
    labels, scores = _check_scores(labels, scores)
    positives = int(np.sum(labels == 1))
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise UndefinedMetricError("AUROC needs both classes present")
    ranks = _average_ranks(scores)
    rank_sum = float(np.sum(ranks[labels == 1]))
    u_statistic = rank_sum - positives * (positives + 1) / 2.0
    auc = u_statistic / (positives * negatives)
    _, tp, fp = _threshold_sweep(labels, scores)
    points = np.empty((len(tp) + 1, 2), dtype=np.float64)
    points[0] = (0.0, 0.0)
    points[1:, 0] = fp / negatives
    points[1:, 1] = tp / positives
    return float(auc), points


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, tie groups averaged."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def aucpr(labels, scores) -> tuple[float, np.ndarray]:
    """Average precision, sum_k (R_k - R_{k-1}) * P_k over descending
    thresholds (step interpolation), plus (recall, precision) points."""
    labels, scores = _check_scores(labels, scores)
    positives = int(np.sum(labels == 1))
    if positives == 0:
        raise UndefinedMetricError("AUCPR needs at least one positive")
    _, tp, fp = _threshold_sweep(labels, scores)
    precision = tp / (tp + fp)
    recall = tp / positives
    ap = float(np.sum(np.diff(np.concatenate([[0.0], recall])) * precision))
    points = np.empty((len(tp) + 1, 2), dtype=np.float64)
    points[0] = (0.0, 1.0)
    points[1:, 0] = recall
    points[1:, 1] = precision
    return ap, points


@dataclass
class AggregateMetrics:
    micro: PRF
    macro: PRF
    weighted: PRF
    class_count: int

    def to_dict(self) -> dict:
        return {
            "micro": self.micro.to_dict(),
            "macro": self.macro.to_dict(),
            "weighted": self.weighted.to_dict(),
            "class_count": self.class_count,
        }


@dataclass
class EvaluationReport:
    threshold: float
    confusion: ConfusionMatrix  # class-1 orientation
    per_class: dict[int, ClassMetrics]
    aggregates: AggregateMetrics
    auroc: float
    aucpr: float
    roc_points: np.ndarray
    pr_points: np.ndarray

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "confusion": self.confusion.to_dict(),
            "per_class": {str(c): m.to_dict() for c, m in sorted(self.per_class.items())},
            "aggregates": self.aggregates.to_dict(),
            "auroc": self.auroc,
            "aucpr": self.aucpr,
            "curves": {
                "roc": [[float(a), float(b)] for a, b in self.roc_points],
                "pr": [[float(a), float(b)] for a, b in self.pr_points],
            },
        }

    def to_text(self) -> str:
        lines = [
            f"threshold: {self.threshold}",
            "",
            "class-wise evaluation",
            f"{'class':>5}  {'precision':>9}  {'recall':>9}  {'f1':>9}  {'support':>8}",
        ]
        for c, m in sorted(self.per_class.items()):
            lines.append(
                f"{c:>5}  {m.precision:>9.4f}  {m.recall:>9.4f}  {m.f1:>9.4f}  {m.support:>8}"
            )
        lines += [
            "",
            "aggregate evaluation",
            f"{'metric':>9}  {'micro':>8}  {'macro':>8}  {'weighted':>8}",
        ]
        agg = self.aggregates
        for name in ("precision", "recall", "f1"):
            lines.append(
                f"{name:>9}  {getattr(agg.micro, name):>8.4f}  "
                f"{getattr(agg.macro, name):>8.4f}  {getattr(agg.weighted, name):>8.4f}"
            )
        lines += [
            "",
            f"AUROC: {self.auroc:.4f}",
            f"AUCPR: {self.aucpr:.4f}",
        ]
        return "\n".join(lines)


def evaluation_report(labels, scores, threshold: float = 0.5) -> EvaluationReport:
    """Threshold the scores and assemble the full two-class report."""
    labels, scores = _check_scores(labels, scores)
    if len(np.unique(labels)) < 2:
        raise UndefinedMetricError("evaluation needs both classes present")
    predictions = (scores >= threshold).astype(np.int8)
    cm1 = confusion_matrix(labels, predictions)
    cm0 = cm1.relabeled()
    m0, m1 = class_metrics(cm0), class_metrics(cm1)
    aggregates = AggregateMetrics(
        micro=micro_average([cm0, cm1]),
        macro=macro_average([m0, m1]),
        weighted=weighted_average([m0, m1]),
        class_count=2,
    )
    auc, roc_points = auroc(labels, scores)
    ap, pr_points = aucpr(labels, scores)
    return EvaluationReport(
        threshold=threshold,
        confusion=cm1,
        per_class={0: m0, 1: m1},
        aggregates=aggregates,
        auroc=auc,
        aucpr=ap,
        roc_points=roc_points,
        pr_points=pr_points,
    )
