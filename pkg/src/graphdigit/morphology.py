"""Binary-mask cleaning primitives: components, size filter, disk opening.

Only what mask post-processing needs; not a general morphology library.
Connectivity defaults to 8-neighbor because hand strokes are thin and
often diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .backend import kernels
from .errors import ParameterError
from .geometry import BinaryMask, as_mask


@dataclass(frozen=True)
class Region:
    """One connected component of a mask."""

    label: int
    area: int
    centroid_row: float
    centroid_col: float
    bbox: tuple[int, int, int, int]  # (min_row, min_col, end_row, end_col), half-open


@dataclass(frozen=True)
class LabeledRegions:
    labels: np.ndarray  # int32, 0 = background
    regions: tuple[Region, ...]


@lru_cache(maxsize=16)
def disk_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets (dr, dc) of the discrete Euclidean disk dr^2+dc^2 <= radius^2."""
    if radius < 1:
        raise ParameterError(f"disk radius must be >= 1, got {radius}")
    span = np.arange(-radius, radius + 1)
    dr, dc = np.meshgrid(span, span, indexing="ij")
    keep = dr * dr + dc * dc <= radius * radius
    return dr[keep].astype(np.int64).copy(), dc[keep].astype(np.int64).copy()


def _check_connectivity(connectivity: int) -> bool:
    if connectivity not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    return connectivity == 8


def label_components(mask: BinaryMask, connectivity: int = 8) -> LabeledRegions:
    """Label connected components and compute their region properties.

    Labels run 1..K in raster-scan order of each component's first pixel.
    """
    eight = _check_connectivity(connectivity)
    m = as_mask(mask).astype(np.uint8)
    labels, count = kernels.label(m, eight)
    return LabeledRegions(labels, _regions_from_labels(labels, count))


def _regions_from_labels(labels: np.ndarray, count: int) -> tuple[Region, ...]:
    if count == 0:
        return ()
    rows, cols = np.nonzero(labels)
    ids = labels[rows, cols]
    areas = np.bincount(ids, minlength=count + 1)
    sum_r = np.bincount(ids, weights=rows, minlength=count + 1)
    sum_c = np.bincount(ids, weights=cols, minlength=count + 1)
    min_r = np.full(count + 1, np.iinfo(np.int64).max)
    min_c = np.full(count + 1, np.iinfo(np.int64).max)
    max_r = np.full(count + 1, -1)
    max_c = np.full(count + 1, -1)
    np.minimum.at(min_r, ids, rows)
    np.minimum.at(min_c, ids, cols)
    np.maximum.at(max_r, ids, rows)
    np.maximum.at(max_c, ids, cols)
    return tuple(
        Region(
            label=k,
            area=int(areas[k]),
            centroid_row=float(sum_r[k] / areas[k]),
            centroid_col=float(sum_c[k] / areas[k]),
            bbox=(int(min_r[k]), int(min_c[k]), int(max_r[k]) + 1, int(max_c[k]) + 1),
        )
        for k in range(1, count + 1)
    )


def remove_small_objects(mask: BinaryMask, min_size: int = 12, connectivity: int = 8) -> BinaryMask:
    """Erase components whose pixel count is below ``min_size``."""
    if min_size < 1:
        raise ParameterError(f"min_size must be >= 1, got {min_size}")
    eight = _check_connectivity(connectivity)
    m = as_mask(mask)
    labels, count = kernels.label(m.astype(np.uint8), eight)
    if count == 0:
        return m.copy()
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    keep = areas >= min_size
    keep[0] = False
    return keep[labels]


def opening_disk(mask: BinaryMask, radius: int = 2) -> BinaryMask:
    """Morphological opening (erosion then dilation) by a Euclidean disk.

    Pixels whose structuring element extends off the raster are eroded,
    so the result is always a subset of the input.
    """
    dr, dc = disk_offsets(radius)
    m = as_mask(mask).astype(np.uint8)
    return kernels.dilate(kernels.erode(m, dr, dc), dr, dc).astype(bool)


def region_props(mask: BinaryMask, connectivity: int = 8) -> tuple[Region, ...]:
    """Centroid/area/bbox records for each component, ordered by label."""
    return label_components(mask, connectivity).regions
