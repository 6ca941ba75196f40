"""Tag-and-sort construction of left-balanced complete k-d trees.

Construction never touches pointers.  Every point carries a 32-bit tag
naming the node whose subtree it currently belongs to; one iteration per
level alternates a stable sort (major key: tag; minor key: the coordinate
the level splits on) with a parallel-friendly per-element tag refinement.
After the last refinement every tag is a distinct node index, so a final
sort by tag alone drops each point into its level-order slot.

The round-robin variant lives here (level ``l`` splits on ``l mod k``); the
widest-dimension variant builds on the same phases in :mod:`lbkd.widest`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import treemath
from .accel import get_kernels

MAX_POINTS = treemath.MAX_NODES


@dataclass
class KdTree:
    """A k-d tree laid out as a gap-free level-order array.

    ``coords[s]`` is the point stored at node ``s``; the children of node
    ``s`` sit at ``2s + 1`` and ``2s + 2`` when those indices are < n.
    ``payload[s]`` is the integer that traveled with the point (by default
    its position in the build input).  ``split_dims`` is stored only by the
    widest-dimension builder; round-robin trees split node ``s`` on
    ``level(s) mod k`` and store nothing.
    """

    coords: np.ndarray
    payload: np.ndarray
    split_dims: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]

    @property
    def levels(self) -> int:
        return treemath.num_levels(self.n) if self.n else 0

    def split_dim_of(self, s: int) -> int:
        """Dimension node ``s`` splits on, whichever variant built the tree."""
        if not 0 <= s < self.n:
            raise ValueError("node index out of range")
        if self.split_dims is not None:
            return int(self.split_dims[s])
        return treemath.level(s) % self.k


@dataclass
class PhaseSnapshot:
    """State captured after one build phase (arrays are copies)."""

    event: str  # "init", "sort", or "update"
    iteration: int  # level the phase worked on; -1 for "init"
    tags: np.ndarray
    coords: np.ndarray


@dataclass
class BuildRecorder:
    """Collects what a build did: phase counts, tag storage, snapshots.

    Pass ``capture=True`` to also keep a copy of the tag and coordinate
    arrays after every phase (meant for small inputs; the golden-state
    checks in :mod:`lbkd.verify` rely on it).
    """

    capture: bool = False
    sort_phases: int = 0
    update_phases: int = 0
    tag_entries: int = 0
    tag_itemsize: int = 0
    snapshots: list[PhaseSnapshot] = field(default_factory=list)

    @property
    def tag_bytes(self) -> int:
        return self.tag_entries * self.tag_itemsize

    def tags_allocated(self, tags: np.ndarray) -> None:
        self.tag_entries = tags.shape[0]
        self.tag_itemsize = tags.dtype.itemsize

    def phase(self, event: str, iteration: int, tags: np.ndarray, coords: np.ndarray) -> None:
        if event == "sort":
            self.sort_phases += 1
        elif event == "update":
            self.update_phases += 1
        if self.capture:
            self.snapshots.append(
                PhaseSnapshot(event, iteration, tags.copy(), coords.copy())
            )


def ingest(points, k: int | None = None, payload=None):
    """Validate build input and return owned ``(coords, payload)`` arrays.

    ``coords`` comes back as a fresh C-contiguous float64 array of shape
    (n, k); 1-d input is treated as n points in one dimension.  The size
    cap is checked before any conversion so oversized inputs are rejected
    without being copied.  Non-finite coordinates are rejected outright.
    """
    raw = np.asarray(points)
    if raw.ndim not in (1, 2):
        raise ValueError(f"points must be a 2-d array, got shape {raw.shape}")
    n = raw.shape[0]
    # reject before reshaping or converting, so oversized views never copy
    if n > MAX_POINTS:
        raise ValueError(
            f"{n} points exceed the 32-bit tag capacity ({MAX_POINTS})"
        )
    if raw.ndim == 1:
        raw = raw.reshape(-1, 1)
    if k is not None and raw.shape[1] != k:
        raise ValueError(f"expected {k} dimensions, input has {raw.shape[1]}")
    if n > 0 and raw.shape[1] < 1:
        raise ValueError("points must have at least one dimension")
    coords = np.ascontiguousarray(raw, dtype=np.float64)
    if coords is raw or coords.base is raw:
        coords = coords.copy()
    if not np.all(np.isfinite(coords)):
        raise ValueError("coordinates must be finite (no NaN or infinity)")
    if payload is None:
        payload = np.arange(n, dtype=np.int64)
    else:
        payload = np.asarray(payload, dtype=np.int64).copy()
        if payload.shape != (n,):
            raise ValueError("payload must be one integer per point")
    return coords, payload


def init_tags(n: int) -> np.ndarray:
    """Fresh tag array: every point starts in the root's subtree."""
    return np.zeros(n, dtype=np.uint32)


def _placed_prefix(l: int, n: int) -> int:
    """How many leading array slots already hold their final node before
    sort pass ``l``: everything placed by sort pass ``l - 1``."""
    if l < 1:
        return 0
    return min((1 << (l - 1)) - 1, n)


def less(tag_a: int, point_a, tag_b: int, point_b, dim: int) -> bool:
    """Construction ordering: by tag first, then by coordinate ``dim``."""
    if tag_a != tag_b:
        return tag_a < tag_b
    return point_a[dim] < point_b[dim]


def sort_phase(coords, tags, payload, l: int, *, skip_prefix: bool = False):
    """Stable-sort all arrays by (tag, coordinate of dimension ``l mod k``).

    Returns reordered ``(coords, tags, payload)``.  With ``skip_prefix``
    the prefix guaranteed to be finalized *and in place* before this pass
    (the ``2^(l-1) - 1`` nodes placed by the previous pass's sort) is left
    alone and only the suffix is sorted.  Nodes finalized by the latest
    update pass are still scattered at their segments' pivots, so the
    skippable prefix is one iteration behind the finalized-tag count;
    either way the result equals a full stable sort.
    """
    dim = l % coords.shape[1]
    start = _placed_prefix(l, tags.shape[0]) if skip_prefix else 0
    order = np.lexsort((coords[start:, dim], tags[start:]))
    if start:
        order = np.concatenate((np.arange(start), order + start))
    return coords[order], tags[order], payload[order]


def update_tags_phase(coords, tags, l: int) -> None:
    """Refine every live tag from its level-``l`` node to the child segment
    the element falls in; pivot elements keep the node, finalizing it."""
    n = tags.shape[0]
    levels = treemath.num_levels(n)
    if not 0 <= l <= levels - 2:
        raise ValueError("update pass runs on levels 0 .. num_levels-2 only")
    get_kernels().update_tags_round_robin(tags, n, levels, l)


def final_sort(coords, tags, payload):
    """Order by tag alone; every tag is a distinct node index by now."""
    order = np.argsort(tags)
    return coords[order], tags[order], payload[order]


def build_round_robin(
    points,
    k: int | None = None,
    payload=None,
    *,
    skip_prefix: bool = False,
    recorder: BuildRecorder | None = None,
) -> KdTree:
    """Build a left-balanced complete k-d tree, splitting level l on l mod k.

    Runs ``num_levels(n)`` sort phases and ``num_levels(n) - 1`` update
    phases regardless of data.  ``skip_prefix`` excludes the finalized
    prefix from the sorts (the result is identical either way).
    """
    coords, payload = ingest(points, k, payload)
    n = coords.shape[0]
    if n == 0:
        return KdTree(coords, payload)
    tags = init_tags(n)
    if recorder is not None:
        recorder.tags_allocated(tags)
        recorder.phase("init", -1, tags, coords)
    levels = treemath.num_levels(n)
    kernels = get_kernels()
    for l in range(levels - 1):
        coords, tags, payload = sort_phase(
            coords, tags, payload, l, skip_prefix=skip_prefix
        )
        if recorder is not None:
            recorder.phase("sort", l, tags, coords)
        kernels.update_tags_round_robin(tags, n, levels, l)
        if recorder is not None:
            recorder.phase("update", l, tags, coords)
    coords, tags, payload = final_sort(coords, tags, payload)
    if recorder is not None:
        recorder.phase("sort", levels - 1, tags, coords)
    return KdTree(coords, payload)
