"""Numba-compiled twins of the hot kernels in ``_kernels_numpy``.

Importing this module requires numba; the selector in ``backend`` guards
that.  Kernels are cached to keep repeat process start-up cheap.
"""

from __future__ import annotations

import numpy as np
import numba
from numba import njit, prange

# workqueue is always available; picking it explicitly avoids the TBB probe
numba.config.THREADING_LAYER = "workqueue"

NAME = "numba"


@njit(cache=True)
def erode(mask, dr, dc):
    h, w = mask.shape
    k = dr.shape[0]
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            if mask[r, c] == 0:
                continue
            keep = True
            for i in range(k):
                rr = r + dr[i]
                cc = c + dc[i]
                if rr < 0 or rr >= h or cc < 0 or cc >= w or mask[rr, cc] == 0:
                    keep = False
                    break
            if keep:
                out[r, c] = 1
    return out


@njit(cache=True)
def dilate(mask, dr, dc):
    h, w = mask.shape
    k = dr.shape[0]
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            if mask[r, c] == 0:
                continue
            for i in range(k):
                rr = r + dr[i]
                cc = c + dc[i]
                if 0 <= rr < h and 0 <= cc < w:
                    out[rr, cc] = 1
    return out


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def label(mask, eight_connected):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    cap = h * w // 2 + 2
    parent = np.empty(cap, dtype=np.int32)
    nxt = 1
    for r in range(h):
        for c in range(w):
            if mask[r, c] == 0:
                continue
            best = 0
            n0 = labels[r - 1, c] if r > 0 else 0
            n1 = labels[r, c - 1] if c > 0 else 0
            n2 = labels[r - 1, c - 1] if (eight_connected and r > 0 and c > 0) else 0
            n3 = labels[r - 1, c + 1] if (eight_connected and r > 0 and c + 1 < w) else 0
            for n in (n0, n1, n2, n3):
                if n != 0 and (best == 0 or n < best):
                    best = n
            if best == 0:
                labels[r, c] = nxt
                parent[nxt] = nxt
                nxt += 1
            else:
                labels[r, c] = best
                for n in (n0, n1, n2, n3):
                    if n != 0 and n != best:
                        ra = _find(parent, best)
                        rb = _find(parent, n)
                        if ra < rb:
                            parent[rb] = ra
                        elif rb < ra:
                            parent[ra] = rb
    final = np.zeros(nxt, dtype=np.int32)
    k = 0
    for i in range(1, nxt):
        if _find(parent, i) == i:
            k += 1
            final[i] = k
    for r in range(h):
        for c in range(w):
            v = labels[r, c]
            if v != 0:
                labels[r, c] = final[_find(parent, v)]
    return labels, k


@njit(cache=True, parallel=True)
def zncc(image, tpl_zero_mean, tpl_ss):
    h, w = image.shape
    th, tw = tpl_zero_mean.shape
    oh = h - th + 1
    ow = w - tw + 1
    n = th * tw
    out = np.zeros((oh, ow), dtype=np.float64)
    for i in prange(oh):
        for j in range(ow):
            s1 = 0.0
            s2 = 0.0
            num = 0.0
            for a in range(th):
                for b in range(tw):
                    v = image[i + a, j + b]
                    s1 += v
                    s2 += v * v
                    num += v * tpl_zero_mean[a, b]
            win_var = s2 - s1 * s1 / n
            if win_var < 0.0:
                win_var = 0.0
            den = np.sqrt(win_var * tpl_ss)
            if den > 1e-9:
                r = num / den
                if r > 1.0:
                    r = 1.0
                elif r < -1.0:
                    r = -1.0
                out[i, j] = r
    return out
