"""Mask post-processing: cleaned masks to calibrated integer time series.

Heart rate: size filter, disk opening, then one centroid per component.
Blood pressures: size filter, then a column walk at alternating +16/+17
steps, scanning bottom-up (systolic) or top-down (diastolic) for the
first foreground pixel; the walk stops for good after ten consecutive
blank samples.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError
from .fileio import Annotation, PointAnnotation, RectAnnotation
from .geometry import (
    DIASTOLIC_BP,
    HEART_RATE,
    SYMBOLS,
    SYSTOLIC_BP,
    BinaryMask,
    GraphGeometry,
    TimeSeries,
    as_mask,
    iround,
    pixel_to_value,
)
from .morphology import disk_offsets, opening_disk, region_props, remove_small_objects

log = logging.getLogger(__name__)

HR_ANNOTATION_RADIUS_PX = 3


def _default_corrections() -> dict[str, float]:
    # Mask-pipeline biases in output units, added before rounding.  The BP
    # values cancel the buffer between a predicted mask edge and the arrow
    # tip; ideal masks should run with these set to 0.
    return {HEART_RATE: 0.0, DIASTOLIC_BP: -4.0, SYSTOLIC_BP: 4.0}


@dataclass(frozen=True)
class ExtractionConfig:
    hr_min_object_px: int = 12
    hr_opening_radius: int = 2
    bp_min_object_px: int = 12
    bp_column_steps: tuple[int, ...] = (16, 17)
    bp_stop_after_blank: int = 10
    corrections: dict[str, float] = field(default_factory=_default_corrections)
    column_window_halfwidth: int = 1

    def __post_init__(self):
        if self.hr_min_object_px < 1 or self.bp_min_object_px < 1:
            raise ValidationError("minimum object sizes must be >= 1")
        if self.hr_opening_radius < 1:
            raise ValidationError("opening radius must be >= 1")
        if not self.bp_column_steps or any(s <= 0 for s in self.bp_column_steps):
            raise ValidationError("bp_column_steps must be positive")
        if self.bp_stop_after_blank < 1:
            raise ValidationError("bp_stop_after_blank must be >= 1")
        if self.column_window_halfwidth < 0:
            raise ValidationError("column_window_halfwidth must be >= 0")
        missing = [s for s in SYMBOLS if s not in self.corrections]
        if missing:
            raise ValidationError(f"corrections missing symbols: {missing}")

    def zero_corrections(self) -> "ExtractionConfig":
        """Copy with all corrections zeroed (for ideal/annotation masks)."""
        from dataclasses import replace

        return replace(self, corrections={s: 0.0 for s in SYMBOLS})


def _check_mask(mask: BinaryMask, geom: GraphGeometry) -> BinaryMask:
    m = as_mask(mask)
    want = (geom.image_height_px, geom.image_width_px)
    if m.shape != want:
        raise ValidationError(f"mask is {m.shape[0]}x{m.shape[1]}, geometry expects {want[0]}x{want[1]}")
    return m


def extract_heart_rate(
    mask: BinaryMask,
    geom: GraphGeometry,
    cfg: ExtractionConfig | None = None,
    diagnostics: list[str] | None = None,
) -> TimeSeries:
    """Digitize a heart-rate mask via per-component centroids.

    When two components round to the same slot, the one whose centroid
    column is closest to the slot gridline wins (ties to the higher
    centroid); the loser is reported as a collision diagnostic.
    """
    cfg = cfg or ExtractionConfig()
    m = _check_mask(mask, geom)
    cleaned = opening_disk(remove_small_objects(m, cfg.hr_min_object_px), cfg.hr_opening_radius)
    series = TimeSeries.blank(HEART_RATE, geom)
    correction = cfg.corrections[HEART_RATE]
    # (distance to gridline, centroid row) per occupied slot, for collisions
    winner: dict[int, tuple[float, float]] = {}
    for reg in region_props(cleaned):
        slot = geom.nearest_slot(reg.centroid_col)
        if not 0 <= slot < geom.slot_count:
            continue
        dist = abs(reg.centroid_col - geom.slot_col(slot))
        key = (dist, reg.centroid_row)
        if slot in winner:
            msg = (
                f"heart-rate slot {slot} collision: component at "
                f"({reg.centroid_row:.1f}, {reg.centroid_col:.1f}) vs existing candidate"
            )
            log.warning(msg)
            if diagnostics is not None:
                diagnostics.append(msg)
            if key >= winner[slot]:
                continue
        winner[slot] = key
        p = geom.image_height_px - reg.centroid_row
        series.slots[slot] = iround(pixel_to_value(p, geom, correction))
    return series


def bp_sample_columns(geom: GraphGeometry, steps: tuple[int, ...]) -> list[int]:
    """Sampled columns for each slot: origin plus alternating steps."""
    cols = [geom.time_origin_col]
    for k in range(1, geom.slot_count):
        cols.append(cols[-1] + steps[(k - 1) % len(steps)])
    return cols


def extract_bp(
    mask: BinaryMask,
    geom: GraphGeometry,
    cfg: ExtractionConfig | None = None,
    kind: str = SYSTOLIC_BP,
    diagnostics: list[str] | None = None,
) -> TimeSeries:
    """Digitize a blood-pressure mask via the alternating column walk."""
    if kind not in (SYSTOLIC_BP, DIASTOLIC_BP):
        raise ParameterError(f"kind must be {SYSTOLIC_BP!r} or {DIASTOLIC_BP!r}, got {kind!r}")
    cfg = cfg or ExtractionConfig()
    m = _check_mask(mask, geom)
    cleaned = remove_small_objects(m, cfg.bp_min_object_px)
    series = TimeSeries.blank(kind, geom)
    correction = cfg.corrections[kind]
    hw = cfg.column_window_halfwidth
    width = geom.image_width_px
    blanks_run = 0
    for slot, col in enumerate(bp_sample_columns(geom, cfg.bp_column_steps)):
        lo, hi = max(0, col - hw), min(width - 1, col + hw)
        rows = np.nonzero(cleaned[:, lo : hi + 1].any(axis=1))[0] if lo <= hi else np.array([])
        if rows.size == 0:
            blanks_run += 1
            if blanks_run >= cfg.bp_stop_after_blank:
                msg = f"{kind} column walk stopped at slot {slot} after {blanks_run} blank samples"
                log.info(msg)
                if diagnostics is not None:
                    diagnostics.append(msg)
                break
            continue
        blanks_run = 0
        stop_row = int(rows.max()) if kind == SYSTOLIC_BP else int(rows.min())
        p = geom.image_height_px - stop_row
        series.slots[slot] = iround(pixel_to_value(p, geom, correction))
    return series


def annotations_to_masks(
    annotations: list[Annotation], geom: GraphGeometry
) -> tuple[BinaryMask, BinaryMask, BinaryMask]:
    """Rasterize annotations into the three independent ground-truth masks.

    Heart-rate points become discrete disks of radius 3; BP rectangles are
    filled as given (bounds inclusive).  Returns (hr, dbp, sbp).
    """
    h, w = geom.image_height_px, geom.image_width_px
    masks = {s: np.zeros((h, w), dtype=bool) for s in SYMBOLS}
    dr, dc = disk_offsets(HR_ANNOTATION_RADIUS_PX)
    for i, ann in enumerate(annotations):
        if isinstance(ann, PointAnnotation):
            if ann.symbol != HEART_RATE:
                raise ValidationError(
                    f"record {i}: point annotations are heart-rate only, got {ann.symbol!r}"
                )
            if not (0 <= ann.row < h and 0 <= ann.col < w):
                raise ValidationError(
                    f"record {i}: point ({ann.row}, {ann.col}) outside the {h}x{w} raster"
                )
            rr = ann.row + dr
            cc = ann.col + dc
            keep = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
            masks[HEART_RATE][rr[keep], cc[keep]] = True
        elif isinstance(ann, RectAnnotation):
            if ann.symbol not in (DIASTOLIC_BP, SYSTOLIC_BP):
                raise ValidationError(
                    f"record {i}: rectangle annotations are BP only, got {ann.symbol!r}"
                )
            if not (0 <= ann.top <= ann.bottom < h and 0 <= ann.left <= ann.right < w):
                raise ValidationError(
                    f"record {i}: rectangle ({ann.top}, {ann.left}, {ann.bottom}, {ann.right}) "
                    f"is not a valid box inside the {h}x{w} raster"
                )
            masks[ann.symbol][ann.top : ann.bottom + 1, ann.left : ann.right + 1] = True
        else:
            raise ValidationError(f"record {i}: unsupported annotation type {type(ann).__name__}")
    return masks[HEART_RATE], masks[DIASTOLIC_BP], masks[SYSTOLIC_BP]
