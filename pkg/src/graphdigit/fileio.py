"""File formats: PGM rasters/masks, series CSV, annotations and sidecar JSON.

All writers are atomic (write to a temp file in the same directory, then
rename) and produce canonical bytes, so save -> load -> save round-trips
are byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, RasterParseError, ValidationError
from .geometry import (
    SYMBOLS,
    BinaryMask,
    GrayImage,
    GraphGeometry,
    TimeSeries,
    as_gray_image,
    as_mask,
)

MASK_FOREGROUND = 255  # masks are stored 0 = background, 255 = foreground


# ---------------------------------------------------------------------------
# atomic writes


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def dump_json(obj) -> str:
    """Canonical JSON used for every structured-text file."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# PGM (binary, "P5") rasters


def _pgm_bytes(img: GrayImage) -> bytes:
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + img.tobytes()


class _PgmScanner:
    """Tracks byte offsets while pulling whitespace/comment-separated tokens."""

    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def fail(self, message: str, offset: int | None = None):
        raise RasterParseError(message, byte_offset=self.pos if offset is None else offset, path=self.path)

    def skip_separators(self) -> None:
        d = self.data
        while self.pos < len(d):
            ch = d[self.pos : self.pos + 1]
            if ch in b" \t\r\n":
                self.pos += 1
            elif ch == b"#":  # comment runs to end of line
                while self.pos < len(d) and d[self.pos : self.pos + 1] != b"\n":
                    self.pos += 1
            else:
                return

    def read_int(self, what: str) -> int:
        self.skip_separators()
        start = self.pos
        d = self.data
        while self.pos < len(d) and d[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            self.fail(f"expected {what}", offset=start)
        return int(d[start : self.pos])


def load_raster(path) -> GrayImage:
    """Load an 8-bit single-channel PGM (P5) file."""
    path = Path(path)
    data = path.read_bytes()
    sc = _PgmScanner(data, path)
    if not data.startswith(b"P5"):
        sc.fail("not a binary PGM file (magic 'P5' missing)", offset=0)
    sc.pos = 2
    width = sc.read_int("width")
    height = sc.read_int("height")
    maxval = sc.read_int("maxval")
    if width < 1 or height < 1:
        raise FormatError(f"{path}: declared size {width}x{height} is not a valid raster")
    if maxval != 255:
        raise FormatError(f"{path}: only 8-bit rasters are supported (maxval 255, got {maxval})")
    # exactly one whitespace byte separates the header from the payload
    if sc.pos >= len(data) or data[sc.pos : sc.pos + 1] not in b" \t\r\n":
        sc.fail("expected single whitespace before pixel data")
    sc.pos += 1
    expected = width * height
    payload = data[sc.pos :]
    if len(payload) < expected:
        raise RasterParseError(
            f"truncated pixel data: header declares {width}x{height} = {expected} bytes, "
            f"found {len(payload)}",
            byte_offset=len(data),
            path=path,
        )
    if len(payload) > expected:
        raise FormatError(
            f"{path}: {len(payload) - expected} trailing bytes beyond the declared {width}x{height} payload"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def save_raster(img: GrayImage, path) -> None:
    atomic_write_bytes(path, _pgm_bytes(as_gray_image(img)))


def load_mask(path) -> BinaryMask:
    """Load a mask raster; any nonzero intensity counts as foreground."""
    return load_raster(path) > 0


def save_mask(mask: BinaryMask, path) -> None:
    mask = as_mask(mask)
    save_raster((mask.astype(np.uint8) * MASK_FOREGROUND), path)


# ---------------------------------------------------------------------------
# padding sidecars


def sidecar_path(raster_path) -> Path:
    return Path(raster_path).with_suffix(".meta.json")


def save_pad_meta(raster_path, offset: tuple[int, int], orig_shape: tuple[int, int]) -> None:
    meta = {
        "row_offset": int(offset[0]),
        "col_offset": int(offset[1]),
        "orig_height": int(orig_shape[0]),
        "orig_width": int(orig_shape[1]),
    }
    atomic_write_text(sidecar_path(raster_path), dump_json(meta))


def load_pad_meta(raster_path) -> tuple[tuple[int, int], tuple[int, int]]:
    """Return ((row_offset, col_offset), (orig_height, orig_width))."""
    p = sidecar_path(raster_path)
    try:
        meta = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{p}: invalid sidecar JSON: {e}") from e
    try:
        return (
            (int(meta["row_offset"]), int(meta["col_offset"])),
            (int(meta["orig_height"]), int(meta["orig_width"])),
        )
    except KeyError as e:
        raise FormatError(f"{p}: sidecar missing field {e}") from e


# ---------------------------------------------------------------------------
# time-series CSV


def series_text(ts: TimeSeries) -> str:
    lines = ["time_min,value"]
    for t, v in zip(ts.times(), ts.slots):
        lines.append(f"{t},{'' if v is None else v}")
    return "\n".join(lines) + "\n"


def save_series(ts: TimeSeries, path) -> None:
    atomic_write_text(path, series_text(ts))


def load_series(path, symbol: str, expected_slots: int | None = None) -> TimeSeries:
    """Parse a ``time_min,value`` CSV back into a TimeSeries.

    Times must be 0, d, 2d, ... for a constant positive d; an empty value
    field is a blank slot.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != "time_min,value":
        raise FormatError(f"{path}: first line must be the header 'time_min,value'")
    slots: list[int | None] = []
    times: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 'time,value', got {line!r}")
        t_txt, v_txt = parts
        try:
            times.append(int(t_txt))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: time {t_txt!r} is not an integer") from None
        if v_txt == "":
            slots.append(None)
        else:
            try:
                slots.append(int(v_txt))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: value {v_txt!r} is not an integer") from None
    if not slots:
        raise FormatError(f"{path}: no data rows")
    if times[0] != 0:
        raise FormatError(f"{path}: times must start at 0, got {times[0]}")
    step = times[1] - times[0] if len(times) > 1 else 5
    if step <= 0 or any(times[i] != i * step for i in range(len(times))):
        raise FormatError(f"{path}: times must advance by a constant positive step")
    if expected_slots is not None and len(slots) != expected_slots:
        raise FormatError(f"{path}: expected {expected_slots} rows, found {len(slots)}")
    return TimeSeries(symbol, slots, slot_minutes=step)


# ---------------------------------------------------------------------------
# annotations


@dataclass(frozen=True)
class PointAnnotation:
    """Heart-rate circle center."""

    symbol: str
    row: int
    col: int


@dataclass(frozen=True)
class RectAnnotation:
    """Blood-pressure arrow bounding box, bounds inclusive."""

    symbol: str
    top: int
    left: int
    bottom: int
    right: int


Annotation = PointAnnotation | RectAnnotation


def annotations_text(records: list[Annotation]) -> str:
    out = []
    for rec in records:
        if isinstance(rec, PointAnnotation):
            out.append({"symbol": rec.symbol, "row": rec.row, "col": rec.col})
        else:
            out.append(
                {
                    "symbol": rec.symbol,
                    "top": rec.top,
                    "left": rec.left,
                    "bottom": rec.bottom,
                    "right": rec.right,
                }
            )
    return dump_json({"version": 1, "records": out})


def save_annotations(records: list[Annotation], path) -> None:
    atomic_write_text(path, annotations_text(records))


def _parse_annotation(i: int, rec: dict, path) -> Annotation:
    where = f"{path}: record {i}"
    if not isinstance(rec, dict):
        raise ValidationError(f"{where}: expected an object, got {type(rec).__name__}")
    symbol = rec.get("symbol")
    if symbol not in SYMBOLS:
        raise ValidationError(f"{where}: unknown symbol {symbol!r}")
    keys = set(rec) - {"symbol"}
    if keys == {"row", "col"}:
        return PointAnnotation(symbol, int(rec["row"]), int(rec["col"]))
    if keys == {"top", "left", "bottom", "right"}:
        return RectAnnotation(
            symbol, int(rec["top"]), int(rec["left"]), int(rec["bottom"]), int(rec["right"])
        )
    raise ValidationError(
        f"{where}: fields must be row/col (point) or top/left/bottom/right (rect), got {sorted(keys)}"
    )


def load_annotations(path) -> list[Annotation]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(doc, dict) or "records" not in doc:
        raise FormatError(f"{path}: expected an object with a 'records' list")
    return [_parse_annotation(i, rec, path) for i, rec in enumerate(doc["records"])]


# filename suffix convention for per-symbol mask/series files
SYMBOL_SUFFIX = {"heart_rate": "hr", "diastolic_bp": "dbp", "systolic_bp": "sbp"}
SUFFIX_SYMBOL = {v: k for k, v in SYMBOL_SUFFIX.items()}


def load_graph_mask(path, geom: GraphGeometry) -> BinaryMask:
    """Load a mask and, if padded with a sidecar, crop it back to graph size.

    Raises ValidationError naming the file when dimensions cannot be
    reconciled with the geometry.
    """
    from .geometry import crop_padded  # local import to avoid cycle at module load

    mask = load_mask(path)
    want = (geom.image_height_px, geom.image_width_px)
    if mask.shape == want:
        return mask
    sc = sidecar_path(path)
    if sc.exists():
        offset, orig = load_pad_meta(path)
        if orig != want:
            raise ValidationError(
                f"{path}: sidecar declares original size {orig[0]}x{orig[1]}, "
                f"geometry expects {want[0]}x{want[1]}"
            )
        return crop_padded(mask, offset, orig)
    raise ValidationError(
        f"{path}: mask is {mask.shape[0]}x{mask.shape[1]}, geometry expects "
        f"{want[0]}x{want[1]} and no sidecar {sc.name} was found"
    )
