import math

import mpmath
import numpy as np
import pytest

from graphdigit.errors import (
    CannotImputeError,
    DegenerateSampleError,
    ParameterError,
    ValidationError,
)
from graphdigit.evaluation import (
    DetectionCounts,
    detection_confusion,
    dice_coefficient,
    error_summary_from_pairs,
    f_test_variances,
    f_upper_p,
    impute_false_negatives,
    paired_t_test,
    precision_recall_f1,
    regression_metrics,
    student_t_upper_p,
    true_positive_errors,
)
from graphdigit.geometry import TimeSeries


def series(values, symbol="heart_rate"):
    return TimeSeries(symbol, list(values))


def scaled_sample(rng, n, want_var):
    """A sample with exactly the requested ddof=1 variance."""
    x = rng.normal(size=n)
    x = (x - x.mean()) / x.std(ddof=1)
    return x * math.sqrt(want_var)


class TestConfusion:
    def test_definition(self):
        c = detection_confusion(series([69, None, None]), series([70, None, 80]))
        assert (c.tp, c.tn, c.fp, c.fn) == (1, 1, 0, 1)

    def test_equal_series(self):
        slots = [None] * 59
        for i in range(10):
            slots[i] = 100 + i
        c = detection_confusion(series(slots), series(slots))
        assert (c.tp, c.tn, c.fp, c.fn) == (10, 49, 0, 0)
        assert c.total == 59

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            detection_confusion(series([1]), series([1, 2]))

    def test_symbol_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            detection_confusion(series([1]), series([1], symbol="systolic_bp"))


class TestPrecisionRecallF1:
    def test_hand_arithmetic(self):
        m = precision_recall_f1(DetectionCounts(tp=9, fp=1, fn=0, tn=0))
        assert m.precision == pytest.approx(0.9)
        assert m.recall == pytest.approx(1.0)
        assert m.f1 == pytest.approx(18 / 19)
        assert not m.degenerate

    def test_vacuous_case_flagged(self):
        m = precision_recall_f1(DetectionCounts(tp=0, fp=0, fn=0, tn=59))
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)
        assert m.degenerate

    def test_all_false_positives(self):
        m = precision_recall_f1(DetectionCounts(tp=0, fp=5, fn=0, tn=0))
        assert m.precision == 0.0


class TestTailProbabilities:
    def test_t_symmetry_at_zero(self):
        for df in (1, 5, 31, 200):
            assert student_t_upper_p(0.0, df) == pytest.approx(0.5, abs=1e-12)

    def test_published_t_p_value(self):
        p = student_t_upper_p(4.13, 31)
        assert 1.0e-4 <= p <= 1.6e-4

    def test_f_at_one_equal_dfs(self):
        assert f_upper_p(1.0, 31, 31) == pytest.approx(0.5, abs=1e-12)

    def test_t_against_mpmath_oracle(self):
        # upper tail via the regularized incomplete beta at 50-digit precision
        mpmath.mp.dps = 50
        for t in (-3.7, -0.4, 0.0, 0.9, 2.2, 4.13, 7.5):
            for df in (1, 4, 31, 100):
                x = df / (df + t * t)
                half = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, x, regularized=True) / 2
                want = half if t >= 0 else 1 - half
                assert student_t_upper_p(t, df) == pytest.approx(float(want), abs=1e-10)

    def test_f_against_mpmath_oracle(self):
        mpmath.mp.dps = 50
        for f in (0.2, 1.0, 3.4, 8.83):
            for d1, d2 in ((3, 7), (31, 31), (600, 650)):
                x = d2 / (d2 + d1 * f)
                want = mpmath.betainc(d2 / 2, d1 / 2, 0, x, regularized=True)
                assert f_upper_p(f, d1, d2) == pytest.approx(float(want), abs=1e-10)

    def test_t_strictly_decreasing(self):
        ts = np.linspace(-4, 6, 60)
        ps = [student_t_upper_p(t, 31) for t in ts]
        assert all(b < a for a, b in zip(ps, ps[1:]))

    def test_bad_df(self):
        with pytest.raises(ParameterError):
            student_t_upper_p(1.0, 0)
        with pytest.raises(ParameterError):
            f_upper_p(1.0, 0, 3)


class TestPairedTTest:
    def test_published_heart_rate_precision_row(self):
        # mean difference 0.029 with standard error 0.0071 over 32 images
        rng = np.random.default_rng(10)
        diffs = 0.029 + scaled_sample(rng, 32, (0.0071 * math.sqrt(32)) ** 2)
        r = paired_t_test(diffs)
        assert r.mean_diff == pytest.approx(0.029, abs=1e-12)
        assert r.standard_error == pytest.approx(0.0071, abs=1e-12)
        assert r.t_statistic == pytest.approx(0.029 / 0.0071, abs=1e-9)
        assert abs(r.t_statistic - 4.13) <= 0.15
        assert r.reject_at_alpha

    def test_alternating_diffs_zero_t(self):
        r = paired_t_test([1, -1, 1, -1])
        assert r.t_statistic == pytest.approx(0.0)
        assert r.p_value == pytest.approx(0.5)
        assert not r.reject_at_alpha

    def test_strong_rejection_row(self):
        rng = np.random.default_rng(11)
        diffs = 0.170 + scaled_sample(rng, 32, (0.0125 * math.sqrt(32)) ** 2)
        r = paired_t_test(diffs)
        assert r.t_statistic == pytest.approx(13.6, abs=1e-9)
        assert r.reject_at_alpha

    def test_shift_invariance_of_sd(self):
        rng = np.random.default_rng(12)
        diffs = rng.normal(0.1, 0.5, size=25)
        r1 = paired_t_test(diffs)
        r2 = paired_t_test(diffs + 7.0)
        assert r2.mean_diff == pytest.approx(r1.mean_diff + 7.0, abs=1e-9)
        assert r2.std_dev == pytest.approx(r1.std_dev, abs=1e-9)

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            paired_t_test([0.5, 0.5, 0.5])
        with pytest.raises(DegenerateSampleError):
            paired_t_test([1.0])


class TestFTest:
    def test_published_variance_rows(self):
        rng = np.random.default_rng(13)
        cases = [(22.79, 6.70, 3.40), (37.00, 4.19, 8.83), (13.57, 10.54, 1.29)]
        for vt, vu, want in cases:
            r = f_test_variances(scaled_sample(rng, 654, vt), scaled_sample(rng, 654, vu))
            assert round(r.f_statistic, 2) == want
            assert r.reject_at_alpha

    def test_identical_samples(self):
        x = [1.0, 2.0, 4.0, 7.0]
        r = f_test_variances(x, x)
        assert r.f_statistic == pytest.approx(1.0)
        assert not r.reject_at_alpha

    def test_zero_variance_denominator(self):
        with pytest.raises(DegenerateSampleError):
            f_test_variances([1.0, 2.0], [3.0, 3.0])


class TestTruePositiveErrors:
    def test_single_overlap(self):
        errs, summary = true_positive_errors(series([100, None]), series([98, 77]))
        assert errs == [2]
        assert summary.mean_error == pytest.approx(2.0)
        assert summary.degenerate  # sd undefined at n=1

    def test_identical_series(self):
        errs, summary = true_positive_errors(series([10, 20, 30]), series([10, 20, 30]))
        assert errs == [0, 0, 0]
        assert summary.std_dev == pytest.approx(0.0)
        assert not summary.degenerate

    def test_no_overlap(self):
        errs, summary = true_positive_errors(series([None, 5]), series([7, None]))
        assert errs == []
        assert summary.n == 0 and summary.degenerate


class TestImputation:
    def test_adjacent_mean(self):
        out = impute_false_negatives(series([10, None, 20]), series([1, 1, 1]))
        assert out.slots == [10, 15, 20]

    def test_nearest_when_no_left(self):
        out = impute_false_negatives(series([None, None, 20]), series([1, 1, 1]))
        assert out.slots == [20, 20, 20]

    def test_nearest_distance_rule(self):
        out = impute_false_negatives(
            series([10, None, None, 30]), series([None, 1, None, None])
        )
        assert out.slots == [10, 10, None, 30]

    def test_tie_goes_to_earlier_slot(self):
        out = impute_false_negatives(series([10, None, 30]), series([None, 1, None]))
        # slot 1 equidistant from 0 and 2, but slots 0 and 2 are both adjacent:
        # adjacent-mean rule applies first
        assert out.slots[1] == 20
        out = impute_false_negatives(
            series([10, None, None, None, 30]), series([None, None, 1, None, None])
        )
        assert out.slots[2] == 10  # distance 2 both ways, earlier wins

    def test_existing_predictions_unchanged(self):
        pred = series([11, None, 33, None])
        truth = series([1, 1, 1, 1])
        out = impute_false_negatives(pred, truth)
        assert out.slots[0] == 11 and out.slots[2] == 33
        assert all(v is not None for v in out.slots)

    def test_blank_pred_cannot_impute(self):
        with pytest.raises(CannotImputeError):
            impute_false_negatives(series([None, None]), series([1, None]))


class TestRegressionMetrics:
    def test_perfect_prediction(self):
        s = series([100, 110, 120])
        m = regression_metrics(s, s)
        assert m.mse == 0 and m.mae == 0
        assert m.r_squared == pytest.approx(1.0)

    def test_hand_arithmetic(self):
        m = regression_metrics(series([101, 108]), series([100, 110]))
        assert m.mse == pytest.approx(2.5)
        assert m.mae == pytest.approx(1.5)
        assert m.r_squared == pytest.approx(1 - 5 / 50)

    def test_blank_at_truth_slot_rejected(self):
        with pytest.raises(ValidationError):
            regression_metrics(series([None, 5]), series([3, 5]))

    def test_constant_truth_flagged(self):
        m = regression_metrics(series([5, 6]), series([5, 5]))
        assert math.isnan(m.r_squared)
        assert m.degenerate


class TestDice:
    def test_identical_nonempty(self):
        m = np.random.default_rng(1).random((8, 9)) < 0.4
        assert dice_coefficient(m, m) == pytest.approx(1.0)

    def test_disjoint(self):
        a = np.zeros((5, 5), dtype=bool)
        b = np.zeros((5, 5), dtype=bool)
        a[0, 0] = True
        b[4, 4] = True
        assert dice_coefficient(a, b) == 0.0

    def test_half_overlap(self):
        a = np.zeros((4, 4), dtype=bool)
        b = np.zeros((4, 4), dtype=bool)
        a[0, 0:4] = True
        b[0, 2:4] = True
        b[1, 0:2] = True
        assert dice_coefficient(a, b) == pytest.approx(0.5)

    def test_both_empty(self):
        z = np.zeros((3, 3), dtype=bool)
        assert dice_coefficient(z, z) == 1.0

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a = rng.random((10, 12)) < 0.5
            b = rng.random((10, 12)) < 0.5
            d = dice_coefficient(a, b)
            assert d == dice_coefficient(b, a)
            assert 0.0 <= d <= 1.0

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            dice_coefficient(np.zeros((2, 2), dtype=bool), np.zeros((3, 3), dtype=bool))


def test_error_summary_from_pairs_empty():
    s = error_summary_from_pairs([], [])
    assert s.n == 0 and s.degenerate
