"""Pure-numpy implementations of the hot kernels.

Same signatures and results as ``_kernels_numba``; selected via the
GRAPHDIGIT_BACKEND environment variable (see ``backend``).  Masks travel
as uint8 0/1 arrays at this layer so both backends share dtypes.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def erode(mask: np.ndarray, dr: np.ndarray, dc: np.ndarray) -> np.ndarray:
    """Binary erosion by the structuring element given as offset lists.

    Outside the raster counts as background, so border pixels whose
    element sticks out are always eroded.
    """
    h, w = mask.shape
    out = np.ones((h, w), dtype=np.uint8)
    for a, b in zip(dr.tolist(), dc.tolist()):
        shifted = np.zeros((h, w), dtype=np.uint8)
        rs0, rs1 = max(0, -a), min(h, h - a)
        cs0, cs1 = max(0, -b), min(w, w - b)
        if rs0 < rs1 and cs0 < cs1:
            shifted[rs0:rs1, cs0:cs1] = mask[rs0 + a : rs1 + a, cs0 + b : cs1 + b]
        out &= shifted
    return out


def dilate(mask: np.ndarray, dr: np.ndarray, dc: np.ndarray) -> np.ndarray:
    """Binary dilation by the structuring element (clipped at borders)."""
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for a, b in zip(dr.tolist(), dc.tolist()):
        rs0, rs1 = max(0, -a), min(h, h - a)
        cs0, cs1 = max(0, -b), min(w, w - b)
        if rs0 < rs1 and cs0 < cs1:
            out[rs0:rs1, cs0:cs1] |= mask[rs0 + a : rs1 + a, cs0 + b : cs1 + b]
    return out


def label(mask: np.ndarray, eight_connected: bool) -> tuple[np.ndarray, int]:
    """Connected-component labeling.

    Labels are 1..K in raster-scan order of each component's first pixel;
    0 is background.
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent: list[int] = [0]  # parent[i] for provisional label i; parent[0] unused

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        # keep the smaller id as root so roots equal first-pixel order
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb

    rows, cols = np.nonzero(mask)
    nxt = 1
    for r, c in zip(rows.tolist(), cols.tolist()):
        neigh = []
        if r > 0 and labels[r - 1, c]:
            neigh.append(labels[r - 1, c])
        if c > 0 and labels[r, c - 1]:
            neigh.append(labels[r, c - 1])
        if eight_connected and r > 0:
            if c > 0 and labels[r - 1, c - 1]:
                neigh.append(labels[r - 1, c - 1])
            if c + 1 < w and labels[r - 1, c + 1]:
                neigh.append(labels[r - 1, c + 1])
        if not neigh:
            labels[r, c] = nxt
            parent.append(nxt)
            nxt += 1
        else:
            m = min(neigh)
            labels[r, c] = m
            for n in neigh:
                union(m, n)
    # resolve to roots and compact to 1..K preserving first-pixel order
    final = np.zeros(nxt, dtype=np.int32)
    k = 0
    for i in range(1, nxt):
        root = find(i)
        if root == i:
            k += 1
            final[i] = k
    root_of = np.array([find(i) for i in range(nxt)], dtype=np.int64)
    if rows.size:
        labels[rows, cols] = final[root_of[labels[rows, cols]]]
    return labels, k


def zncc(image: np.ndarray, tpl_zero_mean: np.ndarray, tpl_ss: float) -> np.ndarray:
    """Zero-mean normalized cross-correlation map over valid positions.

    ``tpl_zero_mean`` has had its mean removed; ``tpl_ss`` is its sum of
    squares.  Windows with (near-)zero variance score 0.  Uses integral
    images for the window statistics and a strided einsum for the
    numerator.
    """
    th, tw = tpl_zero_mean.shape
    n = th * tw
    img = image.astype(np.float64, copy=False)

    win = np.lib.stride_tricks.sliding_window_view(img, (th, tw))
    num = np.einsum("ijkl,kl->ij", win, tpl_zero_mean, optimize=True)

    ii = np.zeros((img.shape[0] + 1, img.shape[1] + 1), dtype=np.float64)
    ii2 = np.zeros_like(ii)
    np.cumsum(np.cumsum(img, axis=0), axis=1, out=ii[1:, 1:])
    np.cumsum(np.cumsum(img * img, axis=0), axis=1, out=ii2[1:, 1:])

    def rect(acc):
        return (
            acc[th:, tw:]
            - acc[:-th, tw:]
            - acc[th:, :-tw]
            + acc[:-th, :-tw]
        )

    s1 = rect(ii)
    s2 = rect(ii2)
    win_var = np.maximum(s2 - s1 * s1 / n, 0.0)

    den = np.sqrt(win_var * tpl_ss)
    out = np.zeros_like(num)
    ok = den > 1e-9
    out[ok] = num[ok] / den[ok]
    np.clip(out, -1.0, 1.0, out=out)
    return out
