import numpy as np
import pytest

from phenolink.metrics import (
    ClassMetrics,
    ConfusionMatrix,
    UndefinedMetricError,
    aucpr,
    auroc,
    class_metrics,
    confusion_matrix,
    evaluation_report,
    false_positive_rate,
    macro_average,
    micro_average,
    weighted_average,
)


def pairwise_auroc(labels, scores):
    """Naive O(n^2) pair-counting oracle, ties half-credited."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def naive_average_precision(labels, scores):
    """Recompute precision/recall from scratch at every threshold."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    total_pos = int((labels == 1).sum())
    ap = 0.0
    prev_recall = 0.0
    for threshold in sorted(set(scores), reverse=True):
        preds = scores >= threshold
        tp = int(((labels == 1) & preds).sum())
        fp = int(((labels == 0) & preds).sum())
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / total_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap


class TestConfusion:
    def test_hand_counts(self):
        cm = confusion_matrix([1, 0, 1, 0], [1, 1, 0, 0])
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (1, 1, 1, 1)

    def test_perfect(self):
        cm = confusion_matrix([1, 0, 1], [1, 0, 1])
        assert cm.fp == 0 and cm.fn == 0

    def test_all_negative_predictions(self):
        cm = confusion_matrix([1, 0, 1], [0, 0, 0])
        assert cm.tp == 0 and cm.fp == 0

    def test_total_is_row_count(self):
        rng = np.random.default_rng(0)
        labels = (rng.random(73) < 0.3).astype(int)
        preds = (rng.random(73) < 0.5).astype(int)
        assert confusion_matrix(labels, preds).total == 73

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_matrix([1, 0], [1])


class TestClassMetrics:
    def test_half_everything(self):
        m = class_metrics(ConfusionMatrix(tp=1, fp=1, fn=1, tn=0))
        assert m.precision == 0.5
        assert m.recall == 0.5
        assert m.f1 == 0.5

    def test_perfect_class(self):
        m = class_metrics(ConfusionMatrix(tp=5, fp=0, fn=0, tn=3))
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_undefined_precision_flagged(self):
        m = class_metrics(ConfusionMatrix(tp=0, fp=0, fn=3, tn=5))
        assert m.precision == 0.0
        assert "precision" in m.undefined
        assert m.f1 == 0.0

    def test_sensitivity_and_fpr_formulas(self):
        cm = ConfusionMatrix(tp=6, fp=2, fn=4, tn=8)
        assert class_metrics(cm).recall == pytest.approx(6 / 10)
        assert false_positive_rate(cm) == pytest.approx(2 / 10)


class TestAverages:
    def binary_cms(self, labels, preds):
        cm1 = confusion_matrix(labels, preds)
        return [cm1.relabeled(), cm1]

    def test_micro_equals_accuracy(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 200))
            labels = (rng.random(n) < rng.uniform(0.1, 0.9)).astype(int)
            preds = (rng.random(n) < 0.5).astype(int)
            micro = micro_average(self.binary_cms(labels, preds))
            accuracy = float((labels == preds).mean())
            assert micro.precision == pytest.approx(accuracy, abs=1e-12)
            assert micro.recall == pytest.approx(accuracy, abs=1e-12)
            assert micro.f1 == pytest.approx(accuracy, abs=1e-12)

    def test_micro_perfect(self):
        micro = micro_average(self.binary_cms(np.array([0, 1, 1]), np.array([0, 1, 1])))
        assert micro.f1 == 1.0

    def test_macro_mean_of_f1(self):
        rows = [
            ClassMetrics(precision=0.9, recall=0.9, f1=0.91, support=925),
            ClassMetrics(precision=0.3, recall=0.8, f1=0.44, support=75),
        ]
        macro = macro_average(rows)
        assert macro.f1 == pytest.approx(0.675)

    def test_macro_identical_classes(self):
        row = ClassMetrics(precision=0.7, recall=0.6, f1=0.65, support=10)
        macro = macro_average([row, row])
        assert (macro.precision, macro.recall, macro.f1) == (0.7, 0.6, 0.65)

    def test_macro_one_and_zero(self):
        rows = [
            ClassMetrics(precision=1.0, recall=1.0, f1=1.0, support=5),
            ClassMetrics(precision=0.0, recall=0.0, f1=0.0, support=5),
        ]
        assert macro_average(rows).f1 == 0.5

    def test_weighted_support_normalized(self):
        rows = [
            ClassMetrics(precision=0.98, recall=0.84, f1=0.91, support=925),
            ClassMetrics(precision=0.30, recall=0.82, f1=0.44, support=75),
        ]
        weighted = weighted_average(rows)
        assert weighted.f1 == pytest.approx(0.91 * 0.925 + 0.44 * 0.075)
        assert round(weighted.f1, 2) == 0.87

    def test_weighted_equal_supports_is_macro(self):
        rows = [
            ClassMetrics(precision=0.8, recall=0.7, f1=0.74, support=50),
            ClassMetrics(precision=0.4, recall=0.9, f1=0.55, support=50),
        ]
        assert weighted_average(rows) == macro_average(rows)

    def test_weighted_single_class(self):
        row = ClassMetrics(precision=0.6, recall=0.5, f1=0.54, support=9)
        assert weighted_average([row]).f1 == pytest.approx(0.54)

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            macro_average([])
        with pytest.raises(ValueError):
            weighted_average(
                [ClassMetrics(precision=1, recall=1, f1=1, support=0)], supports=[0]
            )


class TestAuroc:
    def test_perfectly_separated(self):
        value, _ = auroc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
        assert value == 1.0

    def test_all_scores_equal(self):
        value, _ = auroc([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5])
        assert value == 0.5

    def test_hand_counted_pairs(self):
        value, _ = auroc([1, 0, 0, 1, 1], [0.8, 0.7, 0.3, 0.6, 0.1])
        assert value == pytest.approx(0.5)

    def test_requires_both_classes(self):
        with pytest.raises(UndefinedMetricError):
            auroc([1, 1], [0.2, 0.4])

    def test_trapezoid_equals_rank_statistic(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(3, 200))
            labels = (rng.random(n) < 0.4).astype(int)
            if labels.min() == labels.max():
                continue
            scores = np.round(rng.random(n), 2)  # force ties
            value, points = auroc(labels, scores)
            trapezoid = float(np.trapezoid(points[:, 1], points[:, 0]))
            assert abs(trapezoid - value) < 1e-12

    def test_curve_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(3)
        labels = (rng.random(60) < 0.3).astype(int)
        _, points = auroc(labels, rng.random(60))
        assert tuple(points[0]) == (0.0, 0.0)
        assert tuple(points[-1]) == (1.0, 1.0)
        assert np.all(np.diff(points[:, 0]) >= 0)
        assert np.all(np.diff(points[:, 1]) >= 0)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(4)
        labels = (rng.random(80) < 0.25).astype(int)
        scores = rng.random(80)
        base, _ = auroc(labels, scores)
        assert auroc(labels, 2 * scores + 1)[0] == pytest.approx(base, abs=1e-12)
        assert auroc(labels, scores**3)[0] == pytest.approx(base, abs=1e-12)

    def test_against_pairwise_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            n = int(rng.integers(5, 150))
            labels = (rng.random(n) < 0.35).astype(int)
            if labels.min() == labels.max():
                continue
            scores = np.round(rng.random(n), 2)
            assert auroc(labels, scores)[0] == pytest.approx(
                pairwise_auroc(labels, scores), abs=1e-12
            )


class TestAucpr:
    def test_perfect_ranking(self):
        value, _ = aucpr([0, 0, 1], [0.1, 0.2, 0.9])
        assert value == 1.0

    def test_single_positive_second_of_three(self):
        value, _ = aucpr([0, 1, 0], [0.9, 0.5, 0.1])
        assert value == pytest.approx(0.5)

    def test_requires_a_positive(self):
        with pytest.raises(UndefinedMetricError):
            aucpr([0, 0], [0.2, 0.4])

    def test_random_scores_approach_base_rate(self):
        # E[AP] under a random ranking exceeds the base rate by O(1/n);
        # n = 500 brings that bias inside the 0.02 tolerance
        rng = np.random.default_rng(6)
        rate = 0.2
        labels = (np.arange(500) < 100).astype(int)
        values = []
        for _ in range(1000):
            scores = rng.permutation(500) / 500.0
            values.append(aucpr(labels, scores)[0])
        assert abs(float(np.mean(values)) - rate) < 0.02

    def test_recall_non_decreasing(self):
        rng = np.random.default_rng(7)
        labels = (rng.random(90) < 0.3).astype(int)
        _, points = aucpr(labels, np.round(rng.random(90), 1))
        assert np.all(np.diff(points[:, 0]) >= 0)

    def test_against_naive_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            n = int(rng.integers(4, 120))
            labels = (rng.random(n) < 0.3).astype(int)
            if labels.sum() == 0:
                continue
            scores = np.round(rng.random(n), 2)
            assert aucpr(labels, scores)[0] == pytest.approx(
                naive_average_precision(labels, scores), abs=1e-12
            )

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(9)
        labels = (rng.random(70) < 0.3).astype(int)
        scores = rng.random(70)
        base, _ = aucpr(labels, scores)
        assert aucpr(labels, 2 * scores + 1)[0] == pytest.approx(base, abs=1e-12)
        assert aucpr(labels, scores**3)[0] == pytest.approx(base, abs=1e-12)


class TestReport:
    def test_perfect_scores_all_ones(self):
        labels = np.array([0, 0, 1, 1, 0])
        scores = np.array([0.1, 0.2, 0.9, 0.8, 0.3])
        report = evaluation_report(labels, scores)
        assert report.auroc == 1.0
        assert report.aucpr == 1.0
        for m in report.per_class.values():
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)
        agg = report.aggregates
        assert agg.micro.f1 == agg.macro.f1 == agg.weighted.f1 == 1.0

    def test_internal_consistency(self):
        rng = np.random.default_rng(10)
        labels = (rng.random(300) < 0.2).astype(int)
        scores = np.clip(labels * 0.4 + rng.random(300) * 0.6, 0, 1)
        report = evaluation_report(labels, scores, threshold=0.5)
        m0, m1 = report.per_class[0], report.per_class[1]
        recomputed = (
            m0.f1 * m0.support + m1.f1 * m1.support
        ) / (m0.support + m1.support)
        assert abs(recomputed - report.aggregates.weighted.f1) < 1e-12
        cm = report.confusion
        assert cm.total == 300
        assert m1.support == cm.tp + cm.fn
        assert m0.support == cm.tn + cm.fp

    def test_single_class_rejected(self):
        with pytest.raises(UndefinedMetricError):
            evaluation_report(np.ones(5, dtype=int), np.linspace(0, 1, 5))

    def test_text_tables_shape(self):
        labels = np.array([0, 1, 0, 1])
        scores = np.array([0.2, 0.7, 0.4, 0.9])
        text = evaluation_report(labels, scores).to_text()
        assert "class-wise evaluation" in text
        assert "aggregate evaluation" in text
        assert "AUROC" in text and "AUCPR" in text

    def test_json_dict_round_trips_through_json(self):
        import json

        labels = np.array([0, 1, 0, 1, 1])
        scores = np.array([0.2, 0.7, 0.4, 0.9, 0.5])
        doc = evaluation_report(labels, scores).to_dict()
        assert json.loads(json.dumps(doc)) == doc
