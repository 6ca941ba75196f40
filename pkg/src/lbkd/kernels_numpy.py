"""Reference kernels: vectorized tag updates and plain-python traversals.

This module is the fallback backend (``LBKD_BACKEND=numpy``) and doubles as
the readable definition of what the JIT kernels compute.  The query
traversals are deliberately written in a numba-compilable subset of python:
the numba backend compiles these exact functions, so the two backends
cannot drift apart on traversal logic.

Update kernels refine tags in place.  During iteration ``l`` every live tag
(index >= 2^l - 1) names a level-``l`` node whose segment is contiguous and
sorted; each element compares its own position against the segment's pivot
position and re-tags itself with the left child, the right child, or (at
the pivot itself) keeps the node, which finalizes it.
"""

from __future__ import annotations

import numpy as np


def _pivot_positions(s: np.ndarray, n: int, levels: int, l: int) -> np.ndarray:
    """Pivot array positions for level-``l`` nodes ``s`` (vectorized).

    Valid for ``l <= levels - 2`` (update passes never run on the bottom
    level).  Combines the segment-begin and left-child-subtree-size
    arithmetic so the whole pass stays allocation-light.
    """
    shift = levels - l - 1
    top = (1 << l) - 1
    nls = s - top
    bottom_have = n - ((1 << (levels - 1)) - 1)
    begin = top + nls * ((1 << shift) - 1) + np.minimum(nls << shift, bottom_have)
    # left child sits one level down; its subtree fills width - 1 slots plus
    # whatever of its bottom-level range exists
    cshift = shift - 1
    first = ((2 * s + 2) << cshift) - 1
    on_bottom = np.clip(n - first, 0, 1 << cshift)
    return begin + (1 << cshift) - 1 + on_bottom


def update_tags_round_robin(tags: np.ndarray, n: int, levels: int, l: int) -> None:
    """One refinement pass over the live suffix, splitting at each pivot."""
    top = (1 << l) - 1
    s = tags[top:].astype(np.int64)
    idx = np.arange(top, n, dtype=np.int64)
    pivot = _pivot_positions(s, n, levels, l)
    new = np.where(idx < pivot, 2 * s + 1, np.where(idx > pivot, 2 * s + 2, s))
    tags[top:] = new.astype(tags.dtype)


def update_tags_widest(
    tags: np.ndarray,
    coords: np.ndarray,
    split_dims: np.ndarray,
    world_lo: np.ndarray,
    world_hi: np.ndarray,
    n: int,
    levels: int,
    l: int,
    dim_bits: int,
) -> None:
    """Refinement pass for widest-dimension trees.

    Tags pack ``(node << dim_bits) | split_dim``.  The element at each
    segment's pivot claims the node and records the segment's split
    dimension in ``split_dims``; every other element re-tags itself with
    the child node it falls into and that child's own split dimension: the
    widest axis of the child's bounding box, recovered by clipping the
    world box against the plane just fixed at the pivot and then against
    every finished ancestor plane up the tree.
    """
    top = (1 << l) - 1
    packed = tags[top:].astype(np.int64)
    s = packed >> dim_bits
    d = packed & ((1 << dim_bits) - 1)
    idx = np.arange(top, n, dtype=np.int64)
    pivot = _pivot_positions(s, n, levels, l)

    at_pivot = idx == pivot
    split_dims[s[at_pivot]] = d[at_pivot]

    m = idx.shape[0]
    rows = np.arange(m)
    lo = np.broadcast_to(world_lo, (m, world_lo.shape[0])).copy()
    hi = np.broadcast_to(world_hi, (m, world_hi.shape[0])).copy()

    below = idx < pivot
    plane = coords[pivot, d]
    cur = hi[rows, d]
    hi[rows, d] = np.where(below, np.minimum(cur, plane), cur)
    cur = lo[rows, d]
    lo[rows, d] = np.where(below | at_pivot, cur, np.maximum(cur, plane))

    # clip by the ancestor planes; odd indices are left children, and the
    # clips must intersect (a shallow plane can be looser than a deep one)
    a = s.copy()
    for _ in range(l):
        p = (a - 1) >> 1
        dp = split_dims[p].astype(np.int64)
        cp = coords[p, dp]
        is_left = (a & 1) == 1
        cur = hi[rows, dp]
        hi[rows, dp] = np.where(is_left, np.minimum(cur, cp), cur)
        cur = lo[rows, dp]
        lo[rows, dp] = np.where(is_left, cur, np.maximum(cur, cp))
        a = p

    new_dim = np.argmax(hi - lo, axis=1)
    child = np.where(below, 2 * s + 1, 2 * s + 2)
    new = np.where(at_pivot, packed, (child << dim_bits) | new_dim)
    tags[top:] = new.astype(tags.dtype)


def knn_search(coords, split_dims, k, query, m, out_idx, out_d2):
    """Collect the ``m`` nearest nodes to ``query``; returns how many.

    ``split_dims`` may be empty, in which case node dimensions follow the
    level-round-robin rule.  Results land in ``out_idx``/``out_d2`` sorted
    by (squared distance, node index).  Descends the near side of every
    plane first, stacking the far side with its plane distance; a stacked
    side is skipped if, by the time it is popped, the kept set is full and
    its plane distance exceeds the current worst kept distance.  Equal
    plane distance is still visited: ties break toward lower node index,
    and an equal-distance point can displace a higher-indexed one.
    """
    n = coords.shape[0]
    use_stored = split_dims.shape[0] != 0
    # far-side stack; depth never exceeds the level count, which 32-bit
    # node indices cap at 31
    stack_node = np.empty(32, np.int64)
    stack_d2 = np.empty(32, np.float64)
    top = 0
    count = 0
    worst = np.inf
    node = 0
    while True:
        if node < n:
            d2 = 0.0
            for j in range(k):
                t = query[j] - coords[node, j]
                d2 += t * t
            if count < m:
                take = True
            elif d2 < worst:
                take = True
            elif d2 == worst and node < out_idx[count - 1]:
                take = True
            else:
                take = False
            if take:
                if count < m:
                    pos = count
                    count += 1
                else:
                    pos = m - 1
                while pos > 0 and (
                    out_d2[pos - 1] > d2
                    or (out_d2[pos - 1] == d2 and out_idx[pos - 1] > node)
                ):
                    out_d2[pos] = out_d2[pos - 1]
                    out_idx[pos] = out_idx[pos - 1]
                    pos -= 1
                out_d2[pos] = d2
                out_idx[pos] = node
                if count == m:
                    worst = out_d2[m - 1]
            if use_stored:
                dim = int(split_dims[node])
            else:
                lvl = 0
                v = (node + 1) >> 1
                while v > 0:
                    lvl += 1
                    v >>= 1
                dim = lvl % k
            delta = query[dim] - coords[node, dim]
            if delta <= 0.0:
                near = 2 * node + 1
                far = near + 1
            else:
                far = 2 * node + 1
                near = far + 1
            stack_node[top] = far
            stack_d2[top] = delta * delta
            top += 1
            node = near
        else:
            node = -1
            while top > 0:
                top -= 1
                if count < m or stack_d2[top] <= worst:
                    node = stack_node[top]
                    break
            if node < 0:
                return count


def radius_search(coords, split_dims, k, query, r2, out_idx):
    """Collect all node indices within squared distance ``r2`` of ``query``.

    Returns the count; indices land in ``out_idx`` (room for n entries) in
    traversal order.  A far side is visited whenever its plane distance is
    within the radius, boundary included.
    """
    n = coords.shape[0]
    use_stored = split_dims.shape[0] != 0
    stack_node = np.empty(32, np.int64)
    top = 0
    count = 0
    node = 0
    while True:
        if node < n:
            d2 = 0.0
            for j in range(k):
                t = query[j] - coords[node, j]
                d2 += t * t
            if d2 <= r2:
                out_idx[count] = node
                count += 1
            if use_stored:
                dim = int(split_dims[node])
            else:
                lvl = 0
                v = (node + 1) >> 1
                while v > 0:
                    lvl += 1
                    v >>= 1
                dim = lvl % k
            delta = query[dim] - coords[node, dim]
            if delta <= 0.0:
                near = 2 * node + 1
                far = near + 1
            else:
                far = 2 * node + 1
                near = far + 1
            if delta * delta <= r2:
                stack_node[top] = far
                top += 1
            node = near
        else:
            if top > 0:
                top -= 1
                node = stack_node[top]
            else:
                return count
