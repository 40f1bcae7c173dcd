"""Anti-aliased stroke rasterization shared by templates and the renderer.

A canvas is a float64 array of intensities initialized to the paper
background; strokes darken it via min().  ``finish`` converts to uint8.
"""

from __future__ import annotations

import math

import numpy as np

WHITE = 255.0


def new_canvas(height: int, width: int, background: float = WHITE) -> np.ndarray:
    return np.full((height, width), float(background), dtype=np.float64)


def finish(canvas: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(canvas), 0, 255).astype(np.uint8)


def _apply_coverage(canvas, r0, c0, cov, intensity):
    """Darken canvas toward ``intensity`` where coverage > 0."""
    h, w = canvas.shape
    ch, cw = cov.shape
    r1, c1 = r0 + ch, c0 + cw
    rr0, cc0 = max(r0, 0), max(c0, 0)
    rr1, cc1 = min(r1, h), min(c1, w)
    if rr0 >= rr1 or cc0 >= cc1:
        return
    sub = cov[rr0 - r0 : rr1 - r0, cc0 - c0 : cc1 - c0]
    region = canvas[rr0:rr1, cc0:cc1]
    np.minimum(region, WHITE - sub * (WHITE - intensity), out=region)


def draw_circle_outline(
    canvas: np.ndarray, cr: float, cc: float, radius: float, intensity: float, width: float = 1.3
) -> None:
    """Stroke a circle outline of the given radius centered at (cr, cc)."""
    pad = radius + width / 2 + 1.5
    r0, c0 = int(math.floor(cr - pad)), int(math.floor(cc - pad))
    r1, c1 = int(math.ceil(cr + pad)) + 1, int(math.ceil(cc + pad)) + 1
    rows = np.arange(r0, r1, dtype=np.float64)[:, None]
    cols = np.arange(c0, c1, dtype=np.float64)[None, :]
    dist = np.hypot(rows - cr, cols - cc)
    cov = np.clip(width / 2 + 0.5 - np.abs(dist - radius), 0.0, 1.0)
    _apply_coverage(canvas, r0, c0, cov, intensity)


def draw_segment(
    canvas: np.ndarray,
    r0: float,
    c0: float,
    r1: float,
    c1: float,
    intensity: float,
    width: float = 1.3,
) -> None:
    """Stroke a line segment between two points (row/col coordinates)."""
    pad = width / 2 + 1.5
    rr0 = int(math.floor(min(r0, r1) - pad))
    cc0 = int(math.floor(min(c0, c1) - pad))
    rr1 = int(math.ceil(max(r0, r1) + pad)) + 1
    cc1 = int(math.ceil(max(c0, c1) + pad)) + 1
    rows = np.arange(rr0, rr1, dtype=np.float64)[:, None]
    cols = np.arange(cc0, cc1, dtype=np.float64)[None, :]
    vr, vc = r1 - r0, c1 - c0
    denom = vr * vr + vc * vc
    if denom == 0:
        dist = np.hypot(rows - r0, cols - c0)
    else:
        t = np.clip(((rows - r0) * vr + (cols - c0) * vc) / denom, 0.0, 1.0)
        dist = np.hypot(rows - (r0 + t * vr), cols - (c0 + t * vc))
    cov = np.clip(width / 2 + 0.5 - dist, 0.0, 1.0)
    _apply_coverage(canvas, rr0, cc0, cov, intensity)


def draw_arrow(
    canvas: np.ndarray,
    tip_r: float,
    tip_c: float,
    pointing_down: bool,
    head_len: float,
    head_angle_deg: float,
    shaft_len: float,
    intensity: float,
    width: float = 1.3,
) -> None:
    """Stroke an arrow whose tip sits exactly at (tip_r, tip_c).

    A downward-pointing arrow has its glyph above the tip; an upward one
    below.  ``head_angle_deg`` is measured from the shaft direction.
    """
    sign = -1.0 if pointing_down else 1.0
    a = math.radians(head_angle_deg)
    wr = sign * head_len * math.cos(a)
    wc = head_len * math.sin(a)
    draw_segment(canvas, tip_r, tip_c, tip_r + wr, tip_c - wc, intensity, width)
    draw_segment(canvas, tip_r, tip_c, tip_r + wr, tip_c + wc, intensity, width)
    draw_segment(canvas, tip_r, tip_c, tip_r + sign * shaft_len, tip_c, intensity, width)


def draw_hline(canvas: np.ndarray, row: int, intensity: float) -> None:
    if 0 <= row < canvas.shape[0]:
        np.minimum(canvas[row, :], intensity, out=canvas[row, :])


def draw_vline(canvas: np.ndarray, col: int, intensity: float) -> None:
    if 0 <= col < canvas.shape[1]:
        np.minimum(canvas[:, col], intensity, out=canvas[:, col])
