"""Raster containers, the flowsheet coordinate system, and pixel/value calibration.

Conventions used everywhere in this package:

* rasters are 2-D numpy arrays indexed ``[row, col]``, row 0 at the top;
* "pixel height from image bottom" is ``p = image_height_px - row``;
* grayscale images are uint8 (0 = black ink, 255 = white paper);
* masks are bool (True = symbol foreground).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError

# Symbol kinds, in canonical order.
HEART_RATE = "heart_rate"
DIASTOLIC_BP = "diastolic_bp"
SYSTOLIC_BP = "systolic_bp"
SYMBOLS = (HEART_RATE, DIASTOLIC_BP, SYSTOLIC_BP)

# Type aliases: containers are plain numpy arrays, validated by the helpers below.
GrayImage = np.ndarray  # 2-D uint8
BinaryMask = np.ndarray  # 2-D bool


def iround(x: float) -> int:
    """Round to nearest integer, ties away from the floor (0.5 -> 1).

    Used for every pixel/value/slot rounding so exact .5 cases (odd slot
    columns sit at multiples of 16.5) are deterministic and not subject to
    round-half-even surprises.
    """
    return int(math.floor(x + 0.5))


def as_gray_image(a) -> GrayImage:
    """Validate and return ``a`` as a 2-D uint8 grayscale image."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValidationError(f"grayscale image must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"grayscale image must be at least 1x1, got {arr.shape}")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) or np.issubdtype(arr.dtype, np.floating):
            vals = np.asarray(arr)
            if vals.min() < 0 or vals.max() > 255:
                raise ValidationError("grayscale intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        else:
            raise ValidationError(f"cannot interpret dtype {arr.dtype} as grayscale")
    return arr


def as_mask(a) -> BinaryMask:
    """Validate and return ``a`` as a 2-D boolean mask."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValidationError(f"mask must be 2-D, got shape {arr.shape}")
    if arr.dtype != bool:
        arr = arr.astype(bool)
    return arr


@dataclass(frozen=True)
class GraphGeometry:
    """Calibration constants of the flowsheet graph raster.

    Defaults describe the production graph: a 164x990 raster whose bottom
    13 pixel rows are a compressed 0-30 band, with equidistant gridlines
    every 10 units above it up to 210 at the top edge, and 59 five-minute
    slots spaced 16.5 px apart along the columns.
    """

    image_height_px: int = 164
    image_width_px: int = 990
    bottom_row_px: int = 13
    value_at_first_gridline: float = 30.0
    value_at_top: float = 210.0
    slot_spacing_px: float = 16.5
    slot_minutes: int = 5
    slot_count: int = 59
    time_origin_col: int = 0

    def __post_init__(self):
        if not (0 < self.bottom_row_px < self.image_height_px):
            raise ValidationError(
                f"bottom_row_px must lie strictly inside the image height: "
                f"0 < {self.bottom_row_px} < {self.image_height_px} fails"
            )
        if not self.value_at_first_gridline < self.value_at_top:
            raise ValidationError("value_at_first_gridline must be below value_at_top")
        if self.slot_spacing_px <= 0:
            raise ValidationError("slot_spacing_px must be positive")
        if self.slot_count < 1:
            raise ValidationError("slot_count must be at least 1")
        if self.image_width_px < 1 or self.image_height_px < 1:
            raise ValidationError("image dimensions must be positive")

    def slot_col(self, slot: int) -> float:
        """Column of the gridline for time slot ``slot`` (real-valued)."""
        return self.time_origin_col + slot * self.slot_spacing_px

    def nearest_slot(self, col: float) -> int:
        """Index of the slot whose gridline column is closest to ``col``.

        May fall outside [0, slot_count); callers drop such matches.
        """
        return iround((col - self.time_origin_col) / self.slot_spacing_px)

    def units_per_px(self) -> float:
        return (self.value_at_top - self.value_at_first_gridline) / (
            self.image_height_px - self.bottom_row_px
        )


def pixel_to_value(p: float, geom: GraphGeometry, correction: float = 0.0) -> float:
    """Convert pixel height from image bottom into physiological units.

    Linear map sending bottom_row_px -> value_at_first_gridline and
    image_height_px -> value_at_top, extrapolating outside that range;
    ``correction`` is added in output units.  No rounding happens here.
    """
    if not math.isfinite(p):
        raise ParameterError(f"pixel height must be finite, got {p!r}")
    span_px = geom.image_height_px - geom.bottom_row_px
    span_units = geom.value_at_top - geom.value_at_first_gridline
    return (p - geom.bottom_row_px) / span_px * span_units + geom.value_at_first_gridline + correction


def value_to_pixel(v: float, geom: GraphGeometry) -> float:
    """Exact inverse of :func:`pixel_to_value` with zero correction."""
    span_px = geom.image_height_px - geom.bottom_row_px
    span_units = geom.value_at_top - geom.value_at_first_gridline
    return (v - geom.value_at_first_gridline) / span_units * span_px + geom.bottom_row_px


def binarize(prob: GrayImage, threshold: float = 0.5) -> BinaryMask:
    """Threshold a probability raster (intensity/255) into a mask.

    A pixel is foreground iff intensity/255 > threshold.
    """
    if not (0.0 < threshold < 1.0):
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    img = as_gray_image(prob)
    return img.astype(np.float64) / 255.0 > threshold


def zero_pad(img: np.ndarray, target: int = 1024) -> tuple[np.ndarray, tuple[int, int]]:
    """Center ``img`` on a target x target zero canvas.

    Returns the padded raster and the (row_offset, col_offset) where the
    original content was placed; cropping there recovers the input exactly.
    Works for both grayscale images and masks (dtype preserved).
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D raster, got shape {arr.shape}")
    h, w = arr.shape
    if h > target or w > target:
        raise ParameterError(f"raster {h}x{w} does not fit in {target}x{target}")
    row_off = (target - h) // 2
    col_off = (target - w) // 2
    out = np.zeros((target, target), dtype=arr.dtype)
    out[row_off : row_off + h, col_off : col_off + w] = arr
    return out, (row_off, col_off)


def crop_padded(padded: np.ndarray, offset: tuple[int, int], shape: tuple[int, int]) -> np.ndarray:
    """Undo :func:`zero_pad`: crop ``shape`` at ``offset`` (copy)."""
    r, c = offset
    h, w = shape
    ph, pw = padded.shape
    if r < 0 or c < 0 or r + h > ph or c + w > pw:
        raise ParameterError(
            f"crop {h}x{w} at offset ({r}, {c}) exceeds padded raster {ph}x{pw}"
        )
    return padded[r : r + h, c : c + w].copy()


@dataclass
class TimeSeries:
    """One digitized series: a value or blank for each 5-minute slot.

    ``slots[i]`` is an integer in physiological units or None (blank);
    slot i corresponds to time ``i * slot_minutes`` minutes.
    """

    symbol: str
    slots: list[int | None] = field(default_factory=list)
    slot_minutes: int = 5

    def __post_init__(self):
        if self.symbol not in SYMBOLS:
            raise ValidationError(f"unknown symbol {self.symbol!r}, expected one of {SYMBOLS}")
        for i, v in enumerate(self.slots):
            if v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ValidationError(
                    f"slot {i} of {self.symbol} series holds {v!r}; values must be integers or blank"
                )
        self.slots = [None if v is None else int(v) for v in self.slots]

    @staticmethod
    def blank(symbol: str, geom: GraphGeometry) -> "TimeSeries":
        return TimeSeries(symbol, [None] * geom.slot_count, geom.slot_minutes)

    def times(self) -> list[int]:
        return [i * self.slot_minutes for i in range(len(self.slots))]

    def present_slots(self) -> list[int]:
        return [i for i, v in enumerate(self.slots) if v is not None]

    def with_slots(self, slots: list[int | None]) -> "TimeSeries":
        return TimeSeries(self.symbol, list(slots), self.slot_minutes)


__all__ = [
    "HEART_RATE",
    "DIASTOLIC_BP",
    "SYSTOLIC_BP",
    "SYMBOLS",
    "GrayImage",
    "BinaryMask",
    "GraphGeometry",
    "TimeSeries",
    "iround",
    "as_gray_image",
    "as_mask",
    "pixel_to_value",
    "value_to_pixel",
    "binarize",
    "zero_pad",
    "crop_padded",
]
