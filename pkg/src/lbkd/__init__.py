"""Left-balanced complete k-d trees in flat arrays.

Trees are built bottom-up-free: points carry 32-bit tags naming the node
they currently belong to, and one sort+refine iteration per level drives
every point to its final level-order slot.  No pointers, offsets, or boxes
are stored; queries recover structure from index arithmetic alone.
"""

from .builder import BuildRecorder, KdTree, build_round_robin
from .queries import Neighbor, knn, radius_query
from .widest import build_widest

__all__ = [
    "BuildRecorder",
    "KdTree",
    "Neighbor",
    "build_round_robin",
    "build_widest",
    "knn",
    "radius_query",
]

__version__ = "0.1.0"
