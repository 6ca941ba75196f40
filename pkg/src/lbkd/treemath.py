"""Index arithmetic for left-balanced complete binary trees in level order.

The trees here are stored as plain arrays: the root is element 0 and the
children of element ``i`` are elements ``2i + 1`` and ``2i + 2``.  Because
every level except the last is full and the last level is packed to the
left, the shape of the whole tree, and of every subtree, is determined by
the element count alone.  That is what lets all of these queries run in
constant time on bare integers, with no pointers stored anywhere.

Levels count from 0 at the root.  All functions raise ``ValueError`` when
an argument is outside its documented domain.
"""

from __future__ import annotations

# Node indices are carried in 32-bit tags during construction, so trees are
# capped at 2^31 - 1 nodes.
MAX_NODES = 2**31 - 1


def parent(i: int) -> int:
    """Index of the parent of node ``i`` (``i >= 1``; the root has none)."""
    if i < 1:
        raise ValueError("node 0 is the root and has no parent")
    return (i - 1) >> 1


def left_child(i: int) -> int:
    """Index of the left child of node ``i``.

    The result may lie beyond the end of the array; callers compare it
    against the node count to see whether the child exists.
    """
    if i < 0:
        raise ValueError("negative node index")
    return 2 * i + 1


def right_child(i: int) -> int:
    """Index of the right child of node ``i`` (may not exist; see left_child)."""
    if i < 0:
        raise ValueError("negative node index")
    return 2 * i + 2


def level(i: int) -> int:
    """Level of node ``i``, counting the root as level 0.

    Node indices on level ``l`` are exactly those with ``i + 1`` in
    ``[2^l, 2^(l+1))``, so the level is the bit length of ``i + 1`` minus 1.
    """
    if i < 0:
        raise ValueError("negative node index")
    return (i + 1).bit_length() - 1


def num_levels(n: int) -> int:
    """Number of levels in a tree of ``n`` nodes (``n >= 1``)."""
    if n < 1:
        raise ValueError("tree must have at least one node")
    return n.bit_length()


def full_tree_size(levels: int) -> int:
    """Node count of a full binary tree with ``levels`` levels: 2^levels - 1."""
    if levels < 0:
        raise ValueError("negative level count")
    return (1 << levels) - 1


def leftmost_bottom_slot(s: int, n: int) -> int:
    """Bottom-level slot a full tree would reach by left steps from ``s``.

    One left-child step appends a 1 bit to ``s`` (in the +1 domain), so
    descending to the bottom level appends ``num_levels(n) - level(s) - 1``
    of them.  The result is an index in the full tree and may be >= ``n``
    when the actual bottom level stops short of node ``s``'s slots.
    """
    if not 0 <= s < n:
        raise ValueError("node index out of range")
    shift = num_levels(n) - level(s) - 1
    return ((s + 1) << shift) - 1


def subtree_size(s: int, n: int) -> int:
    """Number of nodes in the subtree of ``s`` in a tree of ``n`` nodes.

    Every level of the subtree above the tree's bottom level is full; the
    bottom level contributes whatever part of the subtree's slot range
    actually exists.
    """
    if not 0 <= s < n:
        raise ValueError("node index out of range")
    shift = num_levels(n) - level(s) - 1
    width = 1 << shift  # bottom-level slots a full subtree would cover
    first = ((s + 1) << shift) - 1
    on_bottom = min(max(0, n - first), width)
    return width - 1 + on_bottom


def num_left_siblings(s: int) -> int:
    """How many nodes precede ``s`` on its own level."""
    if s < 0:
        raise ValueError("negative node index")
    return s - full_tree_size(level(s))


def segment_begin(s: int, n: int) -> int:
    """Array position where subtree ``s``'s elements start mid-construction.

    During the iteration that fixes level ``l = level(s)``, the array holds
    the ``full_tree_size(l)`` already-final nodes first, then each level-l
    subtree's elements as one contiguous segment, in node order.  Each left
    sibling of ``s`` contributes its full interior plus its share of the
    bottom level, and the bottom-level shares are capped by how many
    bottom-level nodes the tree actually has.
    """
    if not 0 <= s < n:
        raise ValueError("node index out of range")
    lvl = level(s)
    lvls = num_levels(n)
    shift = lvls - lvl - 1
    top = (1 << lvl) - 1
    nls = s - top
    bottom_have = n - ((1 << (lvls - 1)) - 1)
    return top + nls * ((1 << shift) - 1) + min(nls << shift, bottom_have)


def pivot_pos(s: int, n: int) -> int:
    """Array position of the element that becomes node ``s``.

    Within segment ``s``, everything before this position belongs to the
    left subtree and everything after it to the right subtree.  When ``s``
    has no left child the pivot is the segment's first element.
    """
    begin = segment_begin(s, n)
    c = 2 * s + 1
    if c < n:
        return begin + subtree_size(c, n)
    return begin
