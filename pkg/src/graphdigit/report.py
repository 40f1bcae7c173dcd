"""Evaluation report assembly for one or two methods against ground truth.

The report is a JSON-able dict: per method and symbol, detection counts,
metrics, true-positive error summaries before and after imputation, and
the raw per-slot pairs; with two methods, paired t-tests on per-image
detection metrics and an F-test on post-imputation error variances.
"""

from __future__ import annotations

import math
from dataclasses import asdict

from .errors import CannotImputeError, DegenerateSampleError, ValidationError
from .evaluation import (
    DetectionCounts,
    detection_confusion,
    error_summary_from_pairs,
    f_test_variances,
    impute_false_negatives,
    paired_t_test,
    precision_recall_f1,
)
from .geometry import SYMBOLS, TimeSeries

METRICS = ("precision", "recall", "f1")

# methods/truth are mappings: image name -> symbol -> TimeSeries
SeriesTable = dict[str, dict[str, TimeSeries]]


def _sanitize(obj):
    """NaN is not valid JSON; encode undefined values as null."""
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _summary_dict(summary) -> dict:
    return _sanitize(asdict(summary))


def evaluate_method(pred: SeriesTable, truth: SeriesTable, alpha: float = 0.05) -> dict:
    """Score one method: totals, per-image metrics, error summaries, pairs."""
    images = sorted(truth)
    missing = [name for name in images if name not in pred]
    if missing:
        raise ValidationError(f"predictions missing for images: {missing}")
    per_symbol: dict[str, dict] = {}
    for symbol in SYMBOLS:
        total = DetectionCounts()
        per_image_metrics: dict[str, list[float]] = {m: [] for m in METRICS}
        pairs: list[list] = []  # [pred_or_null, truth] at truth-present slots
        imputed_pairs: list[list] = []
        impute_failures: list[str] = []
        for name in images:
            p = pred[name][symbol]
            t = truth[name][symbol]
            counts = detection_confusion(p, t)
            total = total + counts
            prf = precision_recall_f1(counts)
            for m in METRICS:
                per_image_metrics[m].append(getattr(prf, m))
            for pv, tv in zip(p.slots, t.slots):
                if tv is not None:
                    pairs.append([pv, tv])
            try:
                filled = impute_false_negatives(p, t)
            except CannotImputeError:
                impute_failures.append(name)
                continue
            for pv, tv in zip(filled.slots, t.slots):
                if tv is not None:
                    imputed_pairs.append([pv, tv])
        tp_pairs = [(pv, tv) for pv, tv in pairs if pv is not None]
        per_symbol[symbol] = {
            "counts": asdict(total),
            "metrics": _sanitize(asdict(precision_recall_f1(total))),
            "per_image_metrics": per_image_metrics,
            "tp_error_summary": _summary_dict(
                error_summary_from_pairs([p for p, _ in tp_pairs], [t for _, t in tp_pairs])
            ),
            "imputed_error_summary": _summary_dict(
                error_summary_from_pairs([p for p, _ in imputed_pairs], [t for _, t in imputed_pairs])
            ),
            "impute_failures": impute_failures,
            "pairs": pairs,
            "imputed_pairs": imputed_pairs,
        }
    return {"per_symbol": per_symbol, "images": images, "alpha": alpha}


def compare_methods(first: dict, second: dict, alpha: float = 0.05) -> dict:
    """Paired tests between two evaluated methods (first is the favored one)."""
    out: dict[str, dict] = {}
    for symbol in SYMBOLS:
        a = first["per_symbol"][symbol]
        b = second["per_symbol"][symbol]
        t_tests = {}
        for m in METRICS:
            diffs = [x - y for x, y in zip(a["per_image_metrics"][m], b["per_image_metrics"][m])]
            try:
                t_tests[m] = _sanitize(asdict(paired_t_test(diffs, alpha=alpha)))
            except DegenerateSampleError as e:
                t_tests[m] = {"degenerate": True, "reason": str(e)}
        errs_a = [p - t for p, t in a["imputed_pairs"]]
        errs_b = [p - t for p, t in b["imputed_pairs"]]
        try:
            f_test = _sanitize(asdict(f_test_variances(errs_b, errs_a, alpha=alpha)))
        except DegenerateSampleError as e:
            f_test = {"degenerate": True, "reason": str(e)}
        out[symbol] = {"t_tests": t_tests, "f_test": f_test}
    return out


def build_report(methods: dict[str, SeriesTable], truth: SeriesTable, alpha: float = 0.05) -> dict:
    """Full evaluation report for 1..2 methods against one truth table."""
    if not methods:
        raise ValidationError("at least one prediction set is required")
    evaluated = {name: evaluate_method(pred, truth, alpha) for name, pred in methods.items()}
    report = {
        "version": 1,
        "alpha": alpha,
        "images": sorted(truth),
        "methods": evaluated,
    }
    names = list(methods)
    if len(names) == 2:
        report["comparison"] = {
            "favored": names[0],
            "baseline": names[1],
            "per_symbol": compare_methods(evaluated[names[0]], evaluated[names[1]], alpha),
        }
    return report
