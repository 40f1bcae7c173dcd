"""Detection confusion, hypothesis tests, error statistics, Dice, imputation.

Sample standard deviations use the n-1 denominator throughout.  Tail
probabilities are exact, via the regularized incomplete beta function;
the alpha decision always derives from the p-value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import CannotImputeError, DegenerateSampleError, ParameterError, ValidationError
from .geometry import BinaryMask, TimeSeries, as_mask, iround

ALTERNATIVES = ("greater", "less", "two-sided")


@dataclass(frozen=True)
class DetectionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValidationError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "DetectionCounts") -> "DetectionCounts":
        return DetectionCounts(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )


@dataclass(frozen=True)
class PrecisionRecallF1:
    precision: float
    recall: float
    f1: float
    degenerate: bool  # True when a 0/0 ratio was reported as the 1.0 sentinel


@dataclass(frozen=True)
class TTestResult:
    mean_diff: float
    std_dev: float
    n: int
    standard_error: float
    t_statistic: float
    p_value: float
    reject_at_alpha: bool
    alpha: float
    alternative: str = "greater"


@dataclass(frozen=True)
class FTestResult:
    var_numerator: float
    var_denominator: float
    df_num: int
    df_den: int
    f_statistic: float
    p_value: float
    reject_at_alpha: bool
    alpha: float


@dataclass(frozen=True)
class ErrorSummary:
    n: int
    mean_error: float
    std_dev: float
    mse: float
    mae: float
    r_squared: float
    degenerate: bool = False  # n < 2, or r_squared undefined (constant truth)


def _check_pair(pred: TimeSeries, truth: TimeSeries) -> None:
    if pred.symbol != truth.symbol:
        raise ValidationError(f"symbol mismatch: {pred.symbol!r} vs {truth.symbol!r}")
    if len(pred.slots) != len(truth.slots):
        raise ValidationError(
            f"slot count mismatch: {len(pred.slots)} vs {len(truth.slots)}"
        )


def detection_confusion(pred: TimeSeries, truth: TimeSeries) -> DetectionCounts:
    """Slotwise presence/absence confusion; numeric agreement is ignored."""
    _check_pair(pred, truth)
    tp = tn = fp = fn = 0
    for p, t in zip(pred.slots, truth.slots):
        if t is not None and p is not None:
            tp += 1
        elif t is None and p is None:
            tn += 1
        elif t is None:
            fp += 1
        else:
            fn += 1
    return DetectionCounts(tp, tn, fp, fn)


def precision_recall_f1(c: DetectionCounts) -> PrecisionRecallF1:
    """Precision, recall and their harmonic mean.

    A 0/0 ratio is vacuously perfect: it reports 1.0 and sets the
    degenerate flag so reports can surface it.
    """
    degenerate = False
    if c.tp + c.fp == 0:
        precision, degenerate = 1.0, True
    else:
        precision = c.tp / (c.tp + c.fp)
    if c.tp + c.fn == 0:
        recall, degenerate = 1.0, True
    else:
        recall = c.tp / (c.tp + c.fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return PrecisionRecallF1(precision, recall, f1, degenerate)


def student_t_upper_p(t: float, df: int) -> float:
    """P(T > t) for Student's t with df degrees of freedom (exact)."""
    if df < 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got {df}")
    x = df / (df + t * t)
    half = 0.5 * float(special.betainc(df / 2.0, 0.5, x))
    return half if t >= 0 else 1.0 - half


def f_upper_p(f: float, df1: int, df2: int) -> float:
    """P(F > f) for the F distribution with (df1, df2) degrees of freedom."""
    if df1 < 1 or df2 < 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got ({df1}, {df2})")
    if f < 0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return float(special.betainc(df2 / 2.0, df1 / 2.0, x))


def paired_t_test(
    diffs,
    alpha: float = 0.05,
    null_value: float = 0.0,
    alternative: str = "greater",
) -> TTestResult:
    """One-sample t-test on per-image metric differences."""
    if alternative not in ALTERNATIVES:
        raise ParameterError(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")
    d = np.asarray(list(diffs), dtype=np.float64)
    n = d.size
    if n < 2:
        raise DegenerateSampleError(f"need at least 2 differences, got {n}")
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("zero standard deviation: t statistic undefined")
    se = sd / math.sqrt(n)
    t = (mean - null_value) / se
    if alternative == "greater":
        p = student_t_upper_p(t, n - 1)
    elif alternative == "less":
        p = 1.0 - student_t_upper_p(t, n - 1)
    else:
        p = 2.0 * student_t_upper_p(abs(t), n - 1)
    return TTestResult(mean, sd, n, se, t, p, p < alpha, alpha, alternative)


def f_test_variances(sample_num, sample_den, alpha: float = 0.05) -> FTestResult:
    """Upper-tailed F-test of var(sample_num) > var(sample_den)."""
    a = np.asarray(list(sample_num), dtype=np.float64)
    b = np.asarray(list(sample_den), dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise DegenerateSampleError("both samples need at least 2 observations")
    var_a = float(a.var(ddof=1))
    var_b = float(b.var(ddof=1))
    if var_b == 0.0:
        raise DegenerateSampleError("zero variance in denominator sample")
    f = var_a / var_b
    p = f_upper_p(f, a.size - 1, b.size - 1)
    return FTestResult(var_a, var_b, a.size - 1, b.size - 1, f, p, p < alpha, alpha)


def _summary(errors: np.ndarray, truth: np.ndarray | None) -> ErrorSummary:
    n = errors.size
    if n == 0:
        return ErrorSummary(0, math.nan, math.nan, math.nan, math.nan, math.nan, True)
    mean = float(errors.mean())
    sd = float(errors.std(ddof=1)) if n >= 2 else math.nan
    mse = float((errors**2).mean())
    mae = float(np.abs(errors).mean())
    r2 = math.nan
    degenerate = n < 2
    if truth is not None and n >= 2:
        ss_tot = float(((truth - truth.mean()) ** 2).sum())
        if ss_tot > 0:
            r2 = 1.0 - float((errors**2).sum()) / ss_tot
        else:
            degenerate = True
    return ErrorSummary(n, mean, sd, mse, mae, r2, degenerate)


def error_summary_from_pairs(pred_values, truth_values) -> ErrorSummary:
    """Summary statistics of (pred - truth) over aligned value lists."""
    p = np.asarray(list(pred_values), dtype=np.float64)
    t = np.asarray(list(truth_values), dtype=np.float64)
    if p.size != t.size:
        raise ValidationError(f"pred/truth length mismatch: {p.size} vs {t.size}")
    return _summary(p - t, t if t.size else None)


def true_positive_errors(pred: TimeSeries, truth: TimeSeries) -> tuple[list[int], ErrorSummary]:
    """(pred - truth) at slots where both hold values, with summary stats."""
    _check_pair(pred, truth)
    errs = []
    tvals = []
    for p, t in zip(pred.slots, truth.slots):
        if p is not None and t is not None:
            errs.append(p - t)
            tvals.append(t)
    arr = np.asarray(errs, dtype=np.float64)
    return errs, _summary(arr, np.asarray(tvals, dtype=np.float64) if tvals else None)


def impute_false_negatives(pred: TimeSeries, truth: TimeSeries) -> TimeSeries:
    """Fill every truth-present blank in pred from neighboring predictions.

    A blank flanked by predictions in both directly adjacent slots takes
    their rounded mean; otherwise the nearest prediction by slot distance
    (earlier slot on ties).  Original predictions are never altered.
    """
    _check_pair(pred, truth)
    present = [i for i, v in enumerate(pred.slots) if v is not None]
    needed = [i for i, t in enumerate(truth.slots) if t is not None and pred.slots[i] is None]
    if needed and not present:
        raise CannotImputeError(
            f"{pred.symbol}: no predictions available to impute {len(needed)} false negatives"
        )
    out = list(pred.slots)
    for i in needed:
        left = pred.slots[i - 1] if i > 0 else None
        right = pred.slots[i + 1] if i + 1 < len(pred.slots) else None
        if left is not None and right is not None:
            out[i] = iround((left + right) / 2)
        else:
            nearest = min(present, key=lambda j: (abs(j - i), j))
            out[i] = pred.slots[nearest]
    return pred.with_slots(out)


def regression_metrics(pred_complete: TimeSeries, truth: TimeSeries) -> ErrorSummary:
    """MSE/MAE/R^2 over truth-present slots; pred must cover all of them."""
    _check_pair(pred_complete, truth)
    errs = []
    tvals = []
    for i, t in enumerate(truth.slots):
        if t is None:
            continue
        p = pred_complete.slots[i]
        if p is None:
            raise ValidationError(
                f"{truth.symbol}: prediction blank at truth-present slot {i}; impute first"
            )
        errs.append(p - t)
        tvals.append(t)
    return _summary(np.asarray(errs, dtype=np.float64), np.asarray(tvals, dtype=np.float64))


def dice_coefficient(a: BinaryMask, b: BinaryMask) -> float:
    """Overlap 2|A.B| / (|A|+|B|); two empty masks agree perfectly (1.0)."""
    ma, mb = as_mask(a), as_mask(b)
    if ma.shape != mb.shape:
        raise ValidationError(f"mask shapes differ: {ma.shape} vs {mb.shape}")
    sa = int(ma.sum())
    sb = int(mb.sum())
    if sa + sb == 0:
        return 1.0
    return 2.0 * int((ma & mb).sum()) / (sa + sb)
