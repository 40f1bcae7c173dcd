"""Template-matching baseline: ZNCC sweeps, threshold gating, slot extraction.

"Cross-correlation" here is always zero-mean normalized cross-correlation
(scores in [-1, 1]); the stock thresholds (0.13/0.16/0.18) only make sense
on that scale.  Arrow templates are built with the tip on the center row,
so a match center row reads directly as the value row.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import draw
from .backend import kernels
from .errors import FormatError, ParameterError
from .fileio import atomic_write_text, dump_json, load_raster, save_raster
from .geometry import (
    DIASTOLIC_BP,
    HEART_RATE,
    SYMBOLS,
    SYSTOLIC_BP,
    GrayImage,
    GraphGeometry,
    TimeSeries,
    as_gray_image,
    iround,
    pixel_to_value,
)

# Family-average match thresholds.
DEFAULT_THRESHOLDS = {HEART_RATE: 0.13, DIASTOLIC_BP: 0.16, SYSTOLIC_BP: 0.18}

# Corrections applied after calibration, before rounding (top-of-cluster
# selection overshoots the BP value rows by about 2.6 units).
TM_CORRECTIONS = {HEART_RATE: 0.0, DIASTOLIC_BP: -2.60, SYSTOLIC_BP: -2.60}

SUPPRESS_RADIUS_PX = 16

CIRCLE_RADII = (2.0, 2.75, 3.5, 4.25, 5.0)
# (head_len, head_angle_deg, shaft_len) variants spanning the hand-drawn range
ARROW_VARIANTS = (
    (4.4, 29.0, 4.8),
    (4.8, 32.0, 5.2),
    (5.2, 35.0, 5.6),
    (5.6, 30.0, 5.0),
    (4.6, 34.0, 5.4),
    (5.4, 28.0, 4.6),
    (5.0, 31.0, 5.8),
)
_STROKE = 40.0  # template ink intensity on white 255


@dataclass(frozen=True)
class Template:
    """A small grayscale exemplar with its match threshold."""

    name: str
    symbol: str
    bitmap: GrayImage
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "bitmap", as_gray_image(self.bitmap))
        if self.symbol not in SYMBOLS:
            raise ParameterError(f"unknown template symbol {self.symbol!r}")
        if not -1.0 <= self.threshold <= 1.0:
            raise ParameterError(f"threshold must lie in [-1, 1], got {self.threshold}")
        if float(np.var(self.bitmap.astype(np.float64))) <= 0.0:
            raise ParameterError(f"template {self.name!r} has zero intensity variance")


@dataclass(frozen=True)
class Match:
    """Center coordinates of one positive template match."""

    row: int
    col: int
    score: float
    template: str


def zncc_map(image: GrayImage, template: Template) -> np.ndarray:
    """ZNCC between the template and every fully-contained window.

    Output shape is (H-th+1, W-tw+1); entry (i, j) scores the window whose
    top-left corner is (i, j).  Constant windows score 0.  Float images are
    correlated as given (scores are invariant to affine intensity changes,
    so prior scaling does not matter).
    """
    image = np.asarray(image)
    if np.issubdtype(image.dtype, np.floating):
        if image.ndim != 2:
            raise ParameterError(f"image must be 2-D, got shape {image.shape}")
        img = image.astype(np.float64)
    else:
        img = as_gray_image(image).astype(np.float64)
    tpl = template.bitmap.astype(np.float64)
    th, tw = tpl.shape
    if th >= img.shape[0] or tw >= img.shape[1]:
        raise ParameterError(
            f"template {template.name!r} ({th}x{tw}) must be strictly smaller "
            f"than the image ({img.shape[0]}x{img.shape[1]})"
        )
    t0 = tpl - tpl.mean()
    tpl_ss = float((t0 * t0).sum())
    if tpl_ss <= 0.0:
        raise ParameterError(f"template {template.name!r} has zero intensity variance")
    return kernels.zncc(img, t0, tpl_ss)


def find_matches(image: GrayImage, templates: list[Template]) -> list[Match]:
    """All window centers whose ZNCC reaches the owning template's threshold."""
    if not templates:
        raise ParameterError("at least one template is required")
    out: list[Match] = []
    for tpl in templates:
        smap = zncc_map(image, tpl)
        th, tw = tpl.bitmap.shape
        rows, cols = np.nonzero(smap >= tpl.threshold)
        for i, j in zip(rows.tolist(), cols.tolist()):
            out.append(Match(i + th // 2, j + tw // 2, float(smap[i, j]), tpl.name))
    return out


def select_slot_matches(
    matches: list[Match],
    geom: GraphGeometry,
    suppress_radius_px: int = SUPPRESS_RADIUS_PX,
) -> dict[int, Match]:
    """Pick one winning match per slot.

    Slots are walked left to right; within a slot the topmost surviving
    match wins (ties to the smaller column), then every match strictly
    within ``suppress_radius_px`` columns of the winner is eliminated.
    Matches whose nearest slot falls outside the graph are dropped.
    """
    if not matches:
        return {}
    cols = np.array([m.col for m in matches], dtype=np.int64)
    suppressed = np.zeros(len(matches), dtype=bool)
    by_slot: dict[int, list[tuple[int, int, int]]] = {}
    for idx, m in enumerate(matches):
        slot = geom.nearest_slot(m.col)
        if 0 <= slot < geom.slot_count:
            by_slot.setdefault(slot, []).append((m.row, m.col, idx))
    selected: dict[int, Match] = {}
    for slot in sorted(by_slot):
        for row, col, idx in sorted(by_slot[slot]):
            if suppressed[idx]:
                continue
            selected[slot] = matches[idx]
            suppressed |= np.abs(cols - col) < suppress_radius_px
            break
    return selected


def tm_extract(
    matches: list[Match],
    geom: GraphGeometry,
    symbol: str,
    correction: float | None = None,
    suppress_radius_px: int = SUPPRESS_RADIUS_PX,
) -> TimeSeries:
    """Reduce raw matches to one value per time slot.

    The winner of each slot (see :func:`select_slot_matches`) converts via
    the calibration map plus ``correction`` (family default when None),
    rounded to the nearest integer.
    """
    if symbol not in SYMBOLS:
        raise ParameterError(f"unknown symbol {symbol!r}")
    if correction is None:
        correction = TM_CORRECTIONS[symbol]
    series = TimeSeries.blank(symbol, geom)
    for slot, m in select_slot_matches(matches, geom, suppress_radius_px).items():
        p = geom.image_height_px - m.row
        series.slots[slot] = iround(pixel_to_value(p, geom, correction))
    return series


# ---------------------------------------------------------------------------
# built-in procedural templates


def _circle_template(radius: float, threshold: float) -> Template:
    half = int(math.ceil(radius)) + 3
    canvas = draw.new_canvas(2 * half + 1, 2 * half + 1)
    draw.draw_circle_outline(canvas, half, half, radius, _STROKE)
    name = f"circle_r{radius:g}".replace(".", "p")
    return Template(name, HEART_RATE, draw.finish(canvas), threshold)


def _arrow_template(symbol: str, index: int, variant: tuple, threshold: float) -> Template:
    head_len, angle, shaft_len = variant
    pointing_down = symbol == SYSTOLIC_BP
    half_h = int(math.ceil(max(shaft_len, head_len))) + 2
    half_w = int(math.ceil(head_len * math.sin(math.radians(angle)))) + 2
    canvas = draw.new_canvas(2 * half_h + 1, 2 * half_w + 1)
    draw.draw_arrow(canvas, half_h, half_w, pointing_down, head_len, angle, shaft_len, _STROKE)
    direction = "down" if pointing_down else "up"
    return Template(f"arrow_{direction}_{index}", symbol, draw.finish(canvas), threshold)


def builtin_templates(symbol: str, threshold: float | None = None) -> list[Template]:
    """Procedural template family for one symbol kind.

    Heart rate: 5 circle outlines of increasing radius.  Each BP: 7 arrows
    of varying head size/angle/shaft length, tip on the center row.  All
    templates share the family threshold unless one is supplied.
    """
    if symbol not in SYMBOLS:
        raise ParameterError(f"unknown symbol {symbol!r}")
    thr = DEFAULT_THRESHOLDS[symbol] if threshold is None else float(threshold)
    if symbol == HEART_RATE:
        return [_circle_template(r, thr) for r in CIRCLE_RADII]
    return [_arrow_template(symbol, i + 1, v, thr) for i, v in enumerate(ARROW_VARIANTS)]


def builtin_template_pack(thresholds: dict[str, float] | None = None) -> list[Template]:
    """All built-in templates, optionally with per-symbol threshold overrides."""
    thresholds = thresholds or {}
    out: list[Template] = []
    for symbol in SYMBOLS:
        out.extend(builtin_templates(symbol, thresholds.get(symbol)))
    return out


# ---------------------------------------------------------------------------
# template pack directory format

PACK_MANIFEST = "manifest.json"


def save_template_pack(templates: list[Template], pack_dir) -> None:
    """Write one raster per template plus a versioned manifest."""
    pack_dir = Path(pack_dir)
    pack_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for tpl in templates:
        fname = f"{tpl.name}.pgm"
        save_raster(tpl.bitmap, pack_dir / fname)
        entries.append(
            {"name": tpl.name, "symbol": tpl.symbol, "threshold": tpl.threshold, "file": fname}
        )
    atomic_write_text(pack_dir / PACK_MANIFEST, dump_json({"version": 1, "templates": entries}))


def load_template_pack(pack_dir) -> list[Template]:
    pack_dir = Path(pack_dir)
    manifest = pack_dir / PACK_MANIFEST
    if not manifest.exists():
        raise FormatError(f"{pack_dir}: template pack manifest {PACK_MANIFEST} not found")
    try:
        doc = json.loads(manifest.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{manifest}: invalid JSON: {e}") from e
    if doc.get("version") != 1:
        raise FormatError(f"{manifest}: unsupported pack version {doc.get('version')!r}")
    out = []
    for entry in doc.get("templates", []):
        bitmap = load_raster(pack_dir / entry["file"])
        out.append(Template(entry["name"], entry["symbol"], bitmap, float(entry["threshold"])))
    return out


def with_threshold(template: Template, threshold: float) -> Template:
    """Copy of a template with its threshold replaced."""
    return replace(template, threshold=threshold)
