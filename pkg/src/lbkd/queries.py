"""Nearest-neighbor and radius queries over the level-order array.

Traversal needs no stored boxes or pointers: from any node the children
are index arithmetic, and the split plane is the node's own coordinate in
its split dimension (stored for widest-dimension trees, ``level mod k``
otherwise).  Distances are squared euclidean throughout; ties on distance
break toward the lower node index, which makes results exactly comparable
against a brute-force scan.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .accel import get_kernels
from .builder import KdTree

_NO_DIMS = np.empty(0, dtype=np.uint8)


class Neighbor(NamedTuple):
    index: int
    dist2: float


def _prep(tree: KdTree, query) -> np.ndarray:
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != tree.k:
        raise ValueError(f"query has {q.shape[0]} dimensions, tree has {tree.k}")
    if not np.all(np.isfinite(q)):
        raise ValueError("query coordinates must be finite")
    return q


def _dims_of(tree: KdTree) -> np.ndarray:
    return tree.split_dims if tree.split_dims is not None else _NO_DIMS


def knn(tree: KdTree, query, m: int) -> list[Neighbor]:
    """The ``m`` nearest tree points to ``query``, nearest first.

    Returns ``min(m, n)`` neighbors ordered by (squared distance, node
    index).  Raises on an empty tree.
    """
    if tree.n == 0:
        raise ValueError("nearest-neighbor query on an empty tree")
    if m < 1:
        raise ValueError("neighbor count must be at least 1")
    q = _prep(tree, query)
    want = min(m, tree.n)
    out_idx = np.empty(want, dtype=np.int64)
    out_d2 = np.empty(want, dtype=np.float64)
    count = get_kernels().knn_search(
        tree.coords, _dims_of(tree), tree.k, q, want, out_idx, out_d2
    )
    return [Neighbor(int(out_idx[i]), float(out_d2[i])) for i in range(count)]


def radius_query(tree: KdTree, query, radius: float) -> np.ndarray:
    """Indices of all tree points within ``radius`` of ``query``.

    Membership uses squared distance <= radius**2, boundary included.
    Returns an int64 array sorted ascending; empty trees yield an empty
    result.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if tree.n == 0:
        return np.empty(0, dtype=np.int64)
    q = _prep(tree, query)
    out_idx = np.empty(tree.n, dtype=np.int64)
    count = get_kernels().radius_search(
        tree.coords, _dims_of(tree), tree.k, q, float(radius) ** 2, out_idx
    )
    return np.sort(out_idx[:count])
