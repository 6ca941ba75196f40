"""JIT kernel backend.

The tag-update passes are rewritten as per-element loops under ``prange``:
every element reads shared finalized state and writes only its own tag (or,
at a pivot, its own node's split-dim slot), so iterations are independent.
The query traversals are the reference implementations compiled as-is; see
kernels_numpy for their documentation.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from . import kernels_numpy as _ref

knn_search = njit(cache=True)(_ref.knn_search)
radius_search = njit(cache=True)(_ref.radius_search)


@njit(cache=True, parallel=True)
def update_tags_round_robin(tags, n, levels, l):
    top = (1 << l) - 1
    shift = levels - l - 1
    cshift = shift - 1
    bottom_have = n - ((1 << (levels - 1)) - 1)
    cwidth = 1 << cshift
    inner = (1 << shift) - 1
    for i in prange(top, n):
        s = np.int64(tags[i])
        nls = s - top
        low_share = nls << shift
        if low_share > bottom_have:
            low_share = bottom_have
        begin = top + nls * inner + low_share
        first = ((2 * s + 2) << cshift) - 1
        on_bottom = n - first
        if on_bottom < 0:
            on_bottom = 0
        elif on_bottom > cwidth:
            on_bottom = cwidth
        pivot = begin + cwidth - 1 + on_bottom
        if i < pivot:
            tags[i] = np.uint32(2 * s + 1)
        elif i > pivot:
            tags[i] = np.uint32(2 * s + 2)


@njit(cache=True, parallel=True)
def update_tags_widest(tags, coords, split_dims, world_lo, world_hi, n, levels, l, dim_bits):
    top = (1 << l) - 1
    shift = levels - l - 1
    cshift = shift - 1
    bottom_have = n - ((1 << (levels - 1)) - 1)
    cwidth = 1 << cshift
    inner = (1 << shift) - 1
    mask = (1 << dim_bits) - 1
    k = coords.shape[1]
    for i in prange(top, n):
        packed = np.int64(tags[i])
        s = packed >> dim_bits
        d = packed & mask
        nls = s - top
        low_share = nls << shift
        if low_share > bottom_have:
            low_share = bottom_have
        begin = top + nls * inner + low_share
        first = ((2 * s + 2) << cshift) - 1
        on_bottom = n - first
        if on_bottom < 0:
            on_bottom = 0
        elif on_bottom > cwidth:
            on_bottom = cwidth
        pivot = begin + cwidth - 1 + on_bottom
        if i == pivot:
            split_dims[s] = d
        else:
            lo = world_lo.copy()
            hi = world_hi.copy()
            plane = coords[pivot, d]
            if i < pivot:
                child = 2 * s + 1
                if plane < hi[d]:
                    hi[d] = plane
            else:
                child = 2 * s + 2
                if plane > lo[d]:
                    lo[d] = plane
            # ancestors are finalized, so their split_dims entries are
            # stable reads while this pass runs
            a = s
            while a > 0:
                p = (a - 1) >> 1
                dp = int(split_dims[p])
                cp = coords[p, dp]
                if a & 1 == 1:
                    if cp < hi[dp]:
                        hi[dp] = cp
                else:
                    if cp > lo[dp]:
                        lo[dp] = cp
                a = p
            best = 0
            best_w = hi[0] - lo[0]
            for j in range(1, k):
                w = hi[j] - lo[j]
                if w > best_w:
                    best_w = w
                    best = j
            tags[i] = np.uint32((child << dim_bits) | best)
