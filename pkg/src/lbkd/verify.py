"""Independent oracles and golden fixtures for checking the fast paths.

Everything in here trades speed for obviousness: subtree sizes by literal
child-counting recursion, construction by recursive median placement,
neighbor queries by full scans, bounding boxes by top-down clipping.  The
fast implementations elsewhere in the package are tested against these,
never against themselves.

The walkthrough fixtures pin every intermediate array state of a 10-point,
2-d round-robin build so any drift in sort or tag-update behavior is caught
against hand-checkable tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import treemath
from .builder import BuildRecorder, KdTree, build_round_robin, ingest
from .queries import Neighbor
from .widest import Aabb, widest_dim, world_bounds

# 10 points in 2-d; the tables below pin the whole construction trace.
WALKTHROUGH_POINTS = np.array(
    [
        (10.0, 15.0),
        (46.0, 63.0),
        (68.0, 21.0),
        (40.0, 33.0),
        (25.0, 54.0),
        (15.0, 43.0),
        (44.0, 58.0),
        (45.0, 40.0),
        (62.0, 69.0),
        (53.0, 67.0),
    ]
)

# (label, tags, x row, y row) after each phase, in phase order.
WALKTHROUGH_STATES = (
    (
        "initial state",
        (0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        (10, 46, 68, 40, 25, 15, 44, 45, 62, 53),
        (15, 63, 21, 33, 54, 43, 58, 40, 69, 67),
    ),
    (
        "sort pass 0",
        (0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        (10, 15, 25, 40, 44, 45, 46, 53, 62, 68),
        (15, 43, 54, 33, 58, 40, 63, 67, 69, 21),
    ),
    (
        "update pass 0",
        (1, 1, 1, 1, 1, 1, 0, 2, 2, 2),
        (10, 15, 25, 40, 44, 45, 46, 53, 62, 68),
        (15, 43, 54, 33, 58, 40, 63, 67, 69, 21),
    ),
    (
        "sort pass 1",
        (0, 1, 1, 1, 1, 1, 1, 2, 2, 2),
        (46, 10, 40, 45, 15, 25, 44, 68, 53, 62),
        (63, 15, 33, 40, 43, 54, 58, 21, 67, 69),
    ),
    (
        "update pass 1",
        (0, 3, 3, 3, 1, 4, 4, 5, 2, 6),
        (46, 10, 40, 45, 15, 25, 44, 68, 53, 62),
        (63, 15, 33, 40, 43, 54, 58, 21, 67, 69),
    ),
    (
        "sort pass 2",
        (0, 1, 2, 3, 3, 3, 4, 4, 5, 6),
        (46, 15, 53, 10, 40, 45, 25, 44, 68, 62),
        (63, 43, 67, 15, 33, 40, 54, 58, 21, 69),
    ),
    (
        "update pass 2",
        (0, 1, 2, 7, 3, 8, 9, 4, 5, 6),
        (46, 15, 53, 10, 40, 45, 25, 44, 68, 62),
        (63, 43, 67, 15, 33, 40, 54, 58, 21, 69),
    ),
    (
        "final sort",
        (0, 1, 2, 3, 4, 5, 6, 7, 8, 9),
        (46, 15, 53, 40, 44, 68, 62, 10, 45, 25),
        (63, 43, 67, 33, 58, 21, 69, 15, 40, 54),
    ),
)


def check_walkthrough(*, skip_prefix: bool = False) -> list[str]:
    """Run the fixture build and diff every phase against its table.

    Returns one message per divergence (empty list means a perfect match);
    each message names the phase whose table failed.
    """
    recorder = BuildRecorder(capture=True)
    build_round_robin(
        WALKTHROUGH_POINTS, recorder=recorder, skip_prefix=skip_prefix
    )
    failures = []
    if len(recorder.snapshots) != len(WALKTHROUGH_STATES):
        failures.append(
            f"expected {len(WALKTHROUGH_STATES)} phases, "
            f"build produced {len(recorder.snapshots)}"
        )
        return failures
    for snap, (label, tags, xs, ys) in zip(recorder.snapshots, WALKTHROUGH_STATES):
        if snap.tags.tolist() != list(tags):
            failures.append(f"{label}: tag row diverges from fixture")
        if snap.coords[:, 0].tolist() != list(map(float, xs)):
            failures.append(f"{label}: x row diverges from fixture")
        if snap.coords[:, 1].tolist() != list(map(float, ys)):
            failures.append(f"{label}: y row diverges from fixture")
    return failures


def reference_build(points, k=None, mode="round-robin", payload=None) -> KdTree:
    """Recursive median-placement construction (the textbook algorithm).

    Sorts each subtree's points along its split dimension, places the
    element whose rank equals the left subtree's size at the node, and
    recurses.  Shares no phase logic with the tag-and-sort builder, which
    is the point.
    """
    if mode not in ("round-robin", "widest"):
        raise ValueError(f"unknown mode {mode!r}")
    coords, payload = ingest(points, k, payload)
    n, kd = coords.shape
    out_coords = np.empty_like(coords)
    out_payload = np.empty_like(payload)
    split_dims = None
    if mode == "widest":
        split_dims = np.zeros(n, dtype=np.min_scalar_type(max(kd - 1, 0)))
    if n == 0:
        return KdTree(out_coords, out_payload, split_dims)

    def place(node: int, idx: np.ndarray, box: Aabb | None) -> None:
        if mode == "widest":
            dim = widest_dim(box)
            split_dims[node] = dim
        else:
            dim = treemath.level(node) % kd
        idx = idx[np.argsort(coords[idx, dim], kind="stable")]
        lc = 2 * node + 1
        offset = treemath.subtree_size(lc, n) if lc < n else 0
        out_coords[node] = coords[idx[offset]]
        out_payload[node] = payload[idx[offset]]
        plane = coords[idx[offset], dim]
        if lc < n:
            lbox = None
            if box is not None:
                lbox = box.copy()
                lbox.hi[dim] = min(lbox.hi[dim], plane)
            place(lc, idx[:offset], lbox)
        if lc + 1 < n:
            rbox = None
            if box is not None:
                rbox = box.copy()
                rbox.lo[dim] = max(rbox.lo[dim], plane)
            place(lc + 1, idx[offset + 1 :], rbox)

    world = world_bounds(coords) if mode == "widest" else None
    place(0, np.arange(n), world)
    return KdTree(out_coords, out_payload, split_dims)


@dataclass
class ValidityReport:
    """Outcome of a whole-tree ordering check.

    When invalid, ``descendant``/``ancestor``/``dim`` pin the first witness
    (lowest descendant index, then nearest ancestor).
    """

    valid: bool
    descendant: int | None = None
    ancestor: int | None = None
    dim: int | None = None
    message: str = ""


def _node_split_dims(tree: KdTree) -> np.ndarray:
    if tree.split_dims is not None:
        return tree.split_dims.astype(np.int64)
    n = tree.n
    bounds = [(1 << l) - 1 for l in range(1, 33)]
    levels = np.searchsorted(bounds, np.arange(n), side="right")
    return levels.astype(np.int64) % tree.k


def check_valid(tree: KdTree) -> ValidityReport:
    """Check every node against every ancestor's split plane.

    Left-subtree coordinates must be <= the plane, right-subtree ones >=
    (closed on both sides, so duplicate-heavy data can always be arranged
    validly).  Completeness and balance are structural facts of the array
    layout and need no checking.
    """
    n = tree.n
    if n <= 1:
        return ValidityReport(True)
    dims = _node_split_dims(tree)
    rows = np.arange(n)
    cur = rows.copy()
    suspect = False
    for _ in range(tree.levels - 1):
        live = cur > 0
        par = np.where(live, (cur - 1) >> 1, 0)
        dp = dims[par]
        own = tree.coords[rows, dp]
        plane = tree.coords[par, dp]
        is_left = (cur & 1) == 1
        bad = np.where(is_left, own > plane, own < plane) & live
        if bad.any():
            suspect = True
            break
        cur = par
    if not suspect:
        return ValidityReport(True)
    # deterministic witness: rescan one node at a time
    for d in range(1, n):
        a = d
        while a > 0:
            p = (a - 1) >> 1
            dp = int(dims[p])
            own = tree.coords[d, dp]
            plane = tree.coords[p, dp]
            if (a & 1 == 1 and own > plane) or (a & 1 == 0 and own < plane):
                side = "left" if a & 1 == 1 else "right"
                return ValidityReport(
                    False,
                    descendant=d,
                    ancestor=p,
                    dim=dp,
                    message=(
                        f"node {d} ({own!r}) is in the {side} subtree of node"
                        f" {p} but crosses its dim-{dp} plane ({plane!r})"
                    ),
                )
            a = p
    return ValidityReport(True)


def brute_subtree_size(s: int, n: int) -> int:
    """Subtree size by literally counting: one plus each existing child."""
    if not 0 <= s < n:
        raise ValueError("node index out of range")
    total = 1
    for c in (2 * s + 1, 2 * s + 2):
        if c < n:
            total += brute_subtree_size(c, n)
    return total


def brute_segment_begin(s: int, n: int) -> int:
    """Segment start by summing the actual sizes of all left siblings."""
    if not 0 <= s < n:
        raise ValueError("node index out of range")
    first = treemath.full_tree_size(treemath.level(s))
    return first + sum(brute_subtree_size(i, n) for i in range(first, s))


def brute_subtree_sizes(n: int) -> np.ndarray:
    """Subtree sizes of every node at once, accumulated bottom-up."""
    sizes = np.ones(n, dtype=np.int64)
    for l in range(treemath.num_levels(n) - 1, 0, -1):
        begin = (1 << l) - 1
        end = min((1 << (l + 1)) - 1, n)
        seg = sizes[begin:end]
        pstart = (begin - 1) >> 1
        lefts = seg[0::2]  # begin is odd, so even offsets are left children
        rights = seg[1::2]
        sizes[pstart : pstart + lefts.shape[0]] += lefts
        sizes[pstart : pstart + rights.shape[0]] += rights
    return sizes


def brute_segment_begins(n: int) -> np.ndarray:
    """Segment starts of every node at once: per-level running sums."""
    sizes = brute_subtree_sizes(n)
    begins = np.empty(n, dtype=np.int64)
    for l in range(treemath.num_levels(n)):
        begin = (1 << l) - 1
        end = min((1 << (l + 1)) - 1, n)
        running = np.cumsum(sizes[begin:end])
        begins[begin] = begin
        begins[begin + 1 : end] = begin + running[: end - begin - 1]
    return begins


def _squared_distances(coords: np.ndarray, query: np.ndarray) -> np.ndarray:
    # same accumulation order as the traversal kernels, so distances are
    # bit-identical and exact comparisons against them are meaningful
    d2 = np.zeros(coords.shape[0], dtype=np.float64)
    for j in range(coords.shape[1]):
        t = query[j] - coords[:, j]
        d2 += t * t
    return d2


def brute_knn(coords, query, m: int) -> list[Neighbor]:
    """The m nearest points by full scan, ordered by (distance, index)."""
    coords = np.asarray(coords, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    d2 = _squared_distances(coords, query)
    order = np.lexsort((np.arange(coords.shape[0]), d2))
    take = min(m, coords.shape[0])
    return [Neighbor(int(i), float(d2[i])) for i in order[:take]]


def brute_radius(coords, query, radius: float) -> np.ndarray:
    """All indices within ``radius`` by full scan, sorted ascending."""
    coords = np.asarray(coords, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    d2 = _squared_distances(coords, query)
    return np.nonzero(d2 <= float(radius) ** 2)[0].astype(np.int64)


def knn_visit_all(tree: KdTree, query, m: int) -> list[Neighbor]:
    """The traversal kernel's keep-m insertion with pruning disabled.

    Visits every node unconditionally; if pruning in the real kernel were
    ever unsound, this and :func:`brute_knn` would disagree with it.
    """
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    want = min(m, tree.n)
    kept: list[tuple[float, int]] = []
    for node in range(tree.n):
        d2 = 0.0
        for j in range(tree.k):
            t = q[j] - tree.coords[node, j]
            d2 += t * t
        cand = (d2, node)
        if len(kept) < want:
            kept.append(cand)
            kept.sort()
        elif want and cand < kept[-1]:
            kept[-1] = cand
            kept.sort()
    return [Neighbor(i, d) for d, i in kept]


def brute_subtree_boxes(tree: KdTree) -> tuple[np.ndarray, np.ndarray]:
    """Bounding boxes of every node's subtree, clipped top-down.

    Returns ``(lo, hi)`` arrays of shape (n, k).  Row 0 is the bounds of
    all points; each child's box is its parent's box intersected with the
    parent's split plane.
    """
    n, k = tree.coords.shape
    lo = np.empty((n, k), dtype=np.float64)
    hi = np.empty((n, k), dtype=np.float64)
    if n == 0:
        return lo, hi
    world = world_bounds(tree.coords)
    lo[0] = world.lo
    hi[0] = world.hi
    for s in range(n):
        d = tree.split_dim_of(s)
        plane = tree.coords[s, d]
        lc = 2 * s + 1
        if lc < n:
            lo[lc] = lo[s]
            hi[lc] = hi[s]
            hi[lc, d] = min(hi[lc, d], plane)
        if lc + 1 < n:
            lo[lc + 1] = lo[s]
            hi[lc + 1] = hi[s]
            lo[lc + 1, d] = max(lo[lc + 1, d], plane)
    return lo, hi
