"""Synthetic flowsheet generation: known records, rendered rasters, ideal masks.

Ground truth uses ideal geometry (value-derived positions, nominal arrow
boxes); only the drawn strokes carry jitter.  Everything is a pure
function of the seeds, so datasets regenerate byte-identically from their
manifest.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import draw
from .errors import FormatError, ParameterError, ValidationError
from .extraction import HR_ANNOTATION_RADIUS_PX, annotations_to_masks
from .fileio import (
    Annotation,
    PointAnnotation,
    RectAnnotation,
    SYMBOL_SUFFIX,
    atomic_write_text,
    dump_json,
    save_mask,
    save_raster,
    save_series,
)
from .geometry import (
    DIASTOLIC_BP,
    HEART_RATE,
    SYMBOLS,
    SYSTOLIC_BP,
    GraphGeometry,
    GrayImage,
    TimeSeries,
    iround,
    value_to_pixel,
)

# Nominal arrow glyph; annotation boxes derive from these, jitter does not move them.
NOMINAL_HEAD_LEN = 5.0
NOMINAL_HEAD_ANGLE_DEG = 32.0
NOMINAL_SHAFT_LEN = 5.0
ARROW_BOX_EXTENT_PX = 7  # rows from tip edge to the far edge of the box
ARROW_BOX_HALF_WIDTH_PX = 3


@dataclass(frozen=True)
class RenderStyle:
    """Jitter ranges and raster cosmetics for the synthetic renderer."""

    circle_radius: tuple[float, float] = (2.6, 4.2)
    arrow_head_len: tuple[float, float] = (4.4, 5.8)
    arrow_head_angle_deg: tuple[float, float] = (28.0, 36.0)
    arrow_shaft_len: tuple[float, float] = (4.5, 5.8)
    stroke_intensity: tuple[float, float] = (35.0, 85.0)
    stroke_width: float = 1.35
    gridline_intensity: float = 200.0
    noise_sigma: float = 2.0
    seed: int = 0

    def __post_init__(self):
        for name in (
            "circle_radius",
            "arrow_head_len",
            "arrow_head_angle_deg",
            "arrow_shaft_len",
            "stroke_intensity",
        ):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValidationError(f"{name} range ({lo}, {hi}) is empty or invalid")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")


def style_from_dict(d: dict) -> RenderStyle:
    kwargs = dict(d)
    for k, v in kwargs.items():
        if isinstance(v, list):
            kwargs[k] = tuple(v)
    return RenderStyle(**kwargs)


@dataclass(frozen=True)
class SurgeryRecord:
    """Per-slot true vitals; None marks a blank slot."""

    heart_rate: tuple[int | None, ...]
    diastolic_bp: tuple[int | None, ...]
    systolic_bp: tuple[int | None, ...]
    duration_slots: int

    def __post_init__(self):
        n = len(self.heart_rate)
        if len(self.diastolic_bp) != n or len(self.systolic_bp) != n:
            raise ValidationError("record series must share one slot count")
        if not 1 <= self.duration_slots <= n:
            raise ValidationError(f"duration_slots must lie in [1, {n}]")
        for sym, vals in zip(SYMBOLS, (self.heart_rate, self.diastolic_bp, self.systolic_bp)):
            for i, v in enumerate(vals):
                if v is not None and not 30 <= v <= 210:
                    raise ValidationError(f"{sym} value {v} at slot {i} outside renderable [30, 210]")
        for i, (d, s) in enumerate(zip(self.diastolic_bp, self.systolic_bp)):
            if d is not None and s is not None and s < d:
                raise ValidationError(f"slot {i}: systolic {s} below diastolic {d}")

    def values(self, symbol: str) -> tuple[int | None, ...]:
        return {
            HEART_RATE: self.heart_rate,
            DIASTOLIC_BP: self.diastolic_bp,
            SYSTOLIC_BP: self.systolic_bp,
        }[symbol]

    def series(self, symbol: str, geom: GraphGeometry) -> TimeSeries:
        return TimeSeries(symbol, list(self.values(symbol)), geom.slot_minutes)


def random_record(
    seed,
    duration_slots: int,
    slot_count: int = 59,
    blank_fraction: float = 0.12,
    max_consecutive_blanks: int = 3,
) -> SurgeryRecord:
    """Bounded random-walk vitals, deterministic in the seed.

    Consecutive blanks are capped well below the BP stop rule so a
    generated record can never truncate its own extraction.
    """
    if not 1 <= duration_slots <= slot_count:
        raise ParameterError(f"duration_slots must lie in [1, {slot_count}], got {duration_slots}")
    rng = np.random.default_rng(seed)
    # baselines stack the three families on the shared axis the way real
    # charts do: diastolic lowest, heart rate between, systolic on top
    hr0 = rng.uniform(70, 95)
    dbp0 = rng.uniform(45, 70)
    pulse0 = rng.uniform(50, 80)
    hr, dbp, pulse = hr0, dbp0, pulse0

    series: dict[str, list[int | None]] = {s: [None] * slot_count for s in SYMBOLS}
    blanks = {s: 0 for s in SYMBOLS}
    for i in range(duration_slots):
        # diffusive walk with mild reversion to the per-record baseline
        hr = float(np.clip(hr + rng.normal(0, 4.0) - 0.10 * (hr - hr0), 50, 115))
        dbp = float(np.clip(dbp + rng.normal(0, 3.0) - 0.10 * (dbp - dbp0), 40, 85))
        pulse = float(np.clip(pulse + rng.normal(0, 3.0) - 0.10 * (pulse - pulse0), 40, 90))
        sbp = float(np.clip(dbp + pulse, 90, 165))
        vals = {HEART_RATE: iround(hr), DIASTOLIC_BP: iround(dbp), SYSTOLIC_BP: iround(sbp)}
        if vals[SYSTOLIC_BP] <= vals[DIASTOLIC_BP]:
            vals[SYSTOLIC_BP] = vals[DIASTOLIC_BP] + 1
        for s in SYMBOLS:
            if blanks[s] < max_consecutive_blanks and rng.random() < blank_fraction:
                blanks[s] += 1
            else:
                blanks[s] = 0
                series[s][i] = vals[s]
    return SurgeryRecord(
        tuple(series[HEART_RATE]),
        tuple(series[DIASTOLIC_BP]),
        tuple(series[SYSTOLIC_BP]),
        duration_slots,
    )


def record_annotations(record: SurgeryRecord, geom: GraphGeometry) -> list[Annotation]:
    """Ideal annotations for a record: circle centers and arrow boxes.

    Boxes are clipped to the raster the same way edge glyphs are; the tip
    edge itself always stays inside for renderable values.
    """
    h, w = geom.image_height_px, geom.image_width_px
    out: list[Annotation] = []
    for slot, v in enumerate(record.heart_rate):
        if v is None:
            continue
        out.append(
            PointAnnotation(HEART_RATE, iround(h - value_to_pixel(v, geom)), iround(geom.slot_col(slot)))
        )
    for symbol in (DIASTOLIC_BP, SYSTOLIC_BP):
        for slot, v in enumerate(record.values(symbol)):
            if v is None:
                continue
            tip_row = iround(h - value_to_pixel(v, geom))
            col = iround(geom.slot_col(slot))
            if symbol == DIASTOLIC_BP:  # upward arrow: glyph hangs below the tip
                top, bottom = tip_row, min(tip_row + ARROW_BOX_EXTENT_PX, h - 1)
            else:  # downward arrow: glyph rises above the tip
                top, bottom = max(tip_row - ARROW_BOX_EXTENT_PX, 0), tip_row
            out.append(
                RectAnnotation(
                    symbol,
                    top,
                    max(col - ARROW_BOX_HALF_WIDTH_PX, 0),
                    bottom,
                    min(col + ARROW_BOX_HALF_WIDTH_PX, w - 1),
                )
            )
    return out


def _check_renderable(record: SurgeryRecord, geom: GraphGeometry) -> None:
    lo, hi = geom.value_at_first_gridline, geom.value_at_top
    for sym in SYMBOLS:
        for slot, v in enumerate(record.values(sym)):
            if v is not None and not lo <= v <= hi:
                raise ValidationError(f"{sym} value {v} at slot {slot} outside renderable [{lo}, {hi}]")


def render_flowsheet(
    record: SurgeryRecord,
    geom: GraphGeometry,
    style: RenderStyle,
    seed=None,
):
    """Render one record: (image, (hr, dbp, sbp) masks, (hr, dbp, sbp) series).

    Gridlines sit at slot columns and 10-unit value rows; symbols are drawn
    at ideal positions with jittered shape parameters and Gaussian noise on
    the image only.  ``seed`` overrides style.seed for the jitter stream.
    """
    _check_renderable(record, geom)
    h, w = geom.image_height_px, geom.image_width_px
    rng = np.random.default_rng(style.seed if seed is None else seed)
    canvas = draw.new_canvas(h, w)

    for slot in range(geom.slot_count):
        draw.draw_vline(canvas, iround(geom.slot_col(slot)), style.gridline_intensity)
    v = geom.value_at_first_gridline
    while v <= geom.value_at_top:
        draw.draw_hline(canvas, iround(h - value_to_pixel(v, geom)), style.gridline_intensity)
        v += 10
    draw.draw_hline(canvas, h - 1, style.gridline_intensity)

    for slot, val in enumerate(record.heart_rate):
        if val is None:
            continue
        row = iround(h - value_to_pixel(val, geom))
        col = iround(geom.slot_col(slot))
        radius = rng.uniform(*style.circle_radius)
        ink = rng.uniform(*style.stroke_intensity)
        draw.draw_circle_outline(canvas, row, col, radius, ink, style.stroke_width)
    for symbol in (DIASTOLIC_BP, SYSTOLIC_BP):
        pointing_down = symbol == SYSTOLIC_BP
        for slot, val in enumerate(record.values(symbol)):
            if val is None:
                continue
            row = iround(h - value_to_pixel(val, geom))
            col = iround(geom.slot_col(slot))
            head = rng.uniform(*style.arrow_head_len)
            angle = rng.uniform(*style.arrow_head_angle_deg)
            shaft = rng.uniform(*style.arrow_shaft_len)
            ink = rng.uniform(*style.stroke_intensity)
            draw.draw_arrow(canvas, row, col, pointing_down, head, angle, shaft, ink, style.stroke_width)

    if style.noise_sigma > 0:
        canvas = canvas + rng.normal(0.0, style.noise_sigma, size=canvas.shape)
    image = draw.finish(canvas)

    masks = annotations_to_masks(record_annotations(record, geom), geom)
    series = tuple(record.series(s, geom) for s in SYMBOLS)
    return image, masks, series


# ---------------------------------------------------------------------------
# dataset generation

MANIFEST_NAME = "manifest.json"
DEFAULT_DURATION_RANGE = (12, 36)


def _image_entry(name: str, base_seed: int, index: int) -> dict:
    return {
        "name": name,
        "record_seed": [base_seed, index, 0],
        "jitter_seed": [base_seed, index, 1],
        "duration_seed": [base_seed, index, 2],
    }


def _write_image(entry: dict, geom: GraphGeometry, style: RenderStyle, out_dir: Path,
                 duration_range: tuple[int, int], blank_fraction: float) -> dict:
    name = entry["name"]
    duration = int(
        np.random.default_rng(entry["duration_seed"]).integers(duration_range[0], duration_range[1] + 1)
    )
    record = random_record(
        entry["record_seed"], duration, slot_count=geom.slot_count, blank_fraction=blank_fraction
    )
    image, masks, series = render_flowsheet(record, geom, style, seed=entry["jitter_seed"])
    paths = {
        "image": f"images/{name}.pgm",
        "masks": {SYMBOL_SUFFIX[s]: f"masks/{name}_{SYMBOL_SUFFIX[s]}.pgm" for s in SYMBOLS},
        "truth": {SYMBOL_SUFFIX[s]: f"truth/{name}_{SYMBOL_SUFFIX[s]}.csv" for s in SYMBOLS},
    }
    save_raster(image, out_dir / paths["image"])
    for s, m, ts in zip(SYMBOLS, masks, series):
        save_mask(m, out_dir / paths["masks"][SYMBOL_SUFFIX[s]])
        save_series(ts, out_dir / paths["truth"][SYMBOL_SUFFIX[s]])
    return {**entry, "duration_slots": duration, **paths}


def generate_dataset(
    n_images: int,
    geom: GraphGeometry,
    style: RenderStyle,
    out_dir,
    blank_fraction: float = 0.12,
    duration_range: tuple[int, int] = DEFAULT_DURATION_RANGE,
) -> dict:
    """Write n rendered images with ideal masks, truth series and a manifest."""
    if n_images < 0:
        raise ParameterError(f"n_images must be >= 0, got {n_images}")
    out_dir = Path(out_dir)
    for sub in ("images", "masks", "truth"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)
    manifest = {
        "version": 1,
        "n_images": n_images,
        "blank_fraction": blank_fraction,
        "duration_range": list(duration_range),
        "geometry": asdict(geom),
        "style": asdict(style),
        "images": [],
    }
    for i in range(n_images):
        entry = _image_entry(f"{i:03d}", style.seed, i)
        manifest["images"].append(
            _write_image(entry, geom, style, out_dir, duration_range, blank_fraction)
        )
    atomic_write_text(out_dir / MANIFEST_NAME, dump_json(manifest))
    return manifest


def regenerate_dataset(manifest_path, out_dir) -> dict:
    """Rebuild a dataset byte-identically from its manifest."""
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{manifest_path}: invalid JSON: {e}") from e
    if manifest.get("version") != 1:
        raise FormatError(f"{manifest_path}: unsupported manifest version")
    geom = GraphGeometry(**manifest["geometry"])
    style = style_from_dict(manifest["style"])
    out_dir = Path(out_dir)
    for sub in ("images", "masks", "truth"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)
    duration_range = tuple(manifest["duration_range"])
    rebuilt = dict(manifest, images=[])
    for entry in manifest["images"]:
        base = {k: entry[k] for k in ("name", "record_seed", "jitter_seed", "duration_seed")}
        rebuilt["images"].append(
            _write_image(base, geom, style, out_dir, duration_range, manifest["blank_fraction"])
        )
    atomic_write_text(out_dir / MANIFEST_NAME, dump_json(rebuilt))
    return rebuilt
