"""Widest-dimension split variant.

Instead of cycling dimensions by level, each subtree splits along the
widest axis of its own bounding box.  The split dimension of a node is
decided at build time and rides in the low bits of the node's tag, so the
sort's minor key is always "my own coordinate in my own split dimension";
the chosen dimensions are also recorded per node, since queries cannot
re-derive them from the index alone.

Bounding boxes are never stored.  A subtree's box is recovered on demand
by clipping the world box against the split plane of every finalized
ancestor on the path to the root, which is cheap because ancestors are, by
construction, already final when the box is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import treemath
from .accel import get_kernels
from .builder import (
    BuildRecorder,
    KdTree,
    MAX_POINTS,
    _placed_prefix,
    final_sort,
    ingest,
)

__all__ = [
    "Aabb",
    "PackedTag",
    "dim_bits_for",
    "pack_tag",
    "unpack_tag",
    "world_bounds",
    "widest_dim",
    "subtree_bounds",
    "build_widest",
]


@dataclass
class Aabb:
    """Axis-aligned bounding box: per-dimension ``lo``/``hi`` float arrays."""

    lo: np.ndarray
    hi: np.ndarray

    def copy(self) -> "Aabb":
        return Aabb(self.lo.copy(), self.hi.copy())

    def widths(self) -> np.ndarray:
        return self.hi - self.lo


class PackedTag(NamedTuple):
    node: int
    dim: int


def dim_bits_for(k: int) -> int:
    """Low tag bits reserved for the split dimension: ceil(log2(k))."""
    if k < 1:
        raise ValueError("dimension count must be at least 1")
    return (k - 1).bit_length()


def pack_tag(node: int, dim: int, dim_bits: int) -> int:
    """Combine node index and split dimension; monotone in ``node``."""
    if dim < 0 or dim >= max(1 << dim_bits, 1):
        raise ValueError("split dimension does not fit the reserved bits")
    return (node << dim_bits) | dim


def unpack_tag(value: int, dim_bits: int) -> PackedTag:
    return PackedTag(value >> dim_bits, value & ((1 << dim_bits) - 1))


def world_bounds(coords: np.ndarray) -> Aabb:
    """Bounding box of all points (requires at least one point)."""
    if coords.shape[0] < 1:
        raise ValueError("bounding box of zero points is undefined")
    return Aabb(coords.min(axis=0).astype(np.float64), coords.max(axis=0).astype(np.float64))


def widest_dim(box: Aabb) -> int:
    """Index of the widest dimension; ties break toward the lower index."""
    return int(np.argmax(box.widths()))


def subtree_bounds(tree_coords, split_dims, node: int, world: Aabb) -> Aabb:
    """Bounding box of ``node``'s subtree, given finalized ancestors.

    Walks from ``node`` to the root, clipping the world box against each
    ancestor's split plane.  Odd indices are left children (their box ends
    at the parent plane), even ones right children (their box starts
    there).  Clips intersect: a shallower plane can be looser than a
    deeper one and must not widen the box again.
    """
    box = world.copy()
    a = node
    while a > 0:
        p = (a - 1) >> 1
        dp = int(split_dims[p])
        cp = tree_coords[p, dp]
        if a & 1 == 1:
            box.hi[dp] = min(box.hi[dp], cp)
        else:
            box.lo[dp] = max(box.lo[dp], cp)
        a = p
    return box


def sort_phase_widest(coords, tags, payload, dim_bits: int, *, start: int = 0):
    """Stable-sort by (tag, own coordinate in the tag's split dimension).

    Elements with different tags never reach the coordinate comparison, and
    elements with equal tags share a dimension, so a per-element gathered
    coordinate is a faithful minor key.
    """
    dims = (tags[start:] & np.uint32((1 << dim_bits) - 1)).astype(np.intp)
    minor = coords[np.arange(start, coords.shape[0]), dims]
    order = np.lexsort((minor, tags[start:]))
    if start:
        order = np.concatenate((np.arange(start), order + start))
    return coords[order], tags[order], payload[order]


def build_widest(
    points,
    k: int | None = None,
    payload=None,
    *,
    skip_prefix: bool = False,
    recorder: BuildRecorder | None = None,
) -> KdTree:
    """Build a left-balanced complete k-d tree splitting on widest extents.

    Same phase structure as the round-robin build; the returned tree
    carries ``split_dims`` (one small unsigned integer per node).
    """
    raw = np.asarray(points)
    if raw.ndim in (1, 2):
        # capacity check before ingest converts anything: node index and
        # dim bits must share a 32-bit tag, so n * 2^dim_bits < 2^31
        n0 = raw.shape[0]
        k0 = raw.shape[1] if raw.ndim == 2 else 1
        if n0 > 0 and k0 > 0 and (n0 << dim_bits_for(k0)) > MAX_POINTS:
            raise ValueError(
                f"{n0} points with {k0} dimensions exceed the 32-bit tag capacity"
            )
    coords, payload = ingest(raw, k, payload)
    n, kd = coords.shape
    dim_bits = dim_bits_for(kd) if n else 0
    dim_dtype = np.min_scalar_type(max(kd - 1, 0))
    split_dims = np.zeros(n, dtype=dim_dtype)
    if n == 0:
        return KdTree(coords, payload, split_dims)
    world = world_bounds(coords)
    root_dim = widest_dim(world)
    tags = np.full(n, pack_tag(0, root_dim, dim_bits), dtype=np.uint32)
    if recorder is not None:
        recorder.tags_allocated(tags)
        recorder.phase("init", -1, tags, coords)
    levels = treemath.num_levels(n)
    kernels = get_kernels()
    for l in range(levels - 1):
        start = _placed_prefix(l, n) if skip_prefix else 0
        coords, tags, payload = sort_phase_widest(
            coords, tags, payload, dim_bits, start=start
        )
        if recorder is not None:
            recorder.phase("sort", l, tags, coords)
        kernels.update_tags_widest(
            tags, coords, split_dims, world.lo, world.hi, n, levels, l, dim_bits
        )
        if recorder is not None:
            recorder.phase("update", l, tags, coords)
    coords, tags, payload = final_sort(coords, tags, payload)
    if recorder is not None:
        recorder.phase("sort", levels - 1, tags, coords)
    # bottom-level nodes never pivot an update pass; their dims still ride
    # in their tags, and after the final sort tag order is node order
    bottom = treemath.full_tree_size(levels - 1)
    split_dims[bottom:] = (tags[bottom:] & np.uint32((1 << dim_bits) - 1)).astype(dim_dtype)
    return KdTree(coords, payload, split_dims)
