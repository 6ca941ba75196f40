"""Index arithmetic against hand values and brute-force counting."""

import numpy as np
import pytest

from lbkd import treemath, verify


def test_parent_and_children():
    assert treemath.parent(1) == 0
    assert treemath.parent(2) == 0
    assert treemath.parent(9) == 4
    assert treemath.left_child(0) == 1
    assert treemath.right_child(0) == 2
    assert treemath.right_child(2) == 6
    assert treemath.left_child(4) == 9
    for i in range(1, 500):
        assert treemath.parent(treemath.left_child(i)) == i
        assert treemath.parent(treemath.right_child(i)) == i


def test_level():
    assert treemath.level(0) == 0
    assert treemath.level(1) == 1
    assert treemath.level(2) == 1
    assert treemath.level(3) == 2
    assert treemath.level(6) == 2
    assert treemath.level(7) == 3
    # level boundaries: node i sits on level l iff i + 1 in [2^l, 2^(l+1))
    for l in range(12):
        assert treemath.level((1 << l) - 1) == l
        assert treemath.level((1 << (l + 1)) - 2) == l


def test_num_levels():
    assert treemath.num_levels(1) == 1
    assert treemath.num_levels(2) == 2
    assert treemath.num_levels(3) == 2
    assert treemath.num_levels(4) == 3
    assert treemath.num_levels(10) == 4
    assert treemath.num_levels(1024) == 11
    for n in range(1, 300):
        assert treemath.num_levels(n) == treemath.level(n - 1) + 1


def test_full_tree_size():
    assert treemath.full_tree_size(0) == 0
    assert treemath.full_tree_size(1) == 1
    assert treemath.full_tree_size(2) == 3
    assert treemath.full_tree_size(3) == 7
    assert treemath.full_tree_size(10) == 1023


def test_leftmost_bottom_slot():
    assert treemath.leftmost_bottom_slot(0, 10) == 7
    assert treemath.leftmost_bottom_slot(3, 10) == 7
    assert treemath.leftmost_bottom_slot(4, 10) == 9
    # beyond the short bottom level: a full tree would need slot 11
    assert treemath.leftmost_bottom_slot(5, 10) == 11
    # one pure left-child walk gives the same slot
    for n in (10, 37, 64, 100):
        levels = treemath.num_levels(n)
        for s in range(n):
            slot = s
            for _ in range(levels - treemath.level(s) - 1):
                slot = treemath.left_child(slot)
            assert treemath.leftmost_bottom_slot(s, n) == slot


def test_subtree_size_hand_values():
    assert treemath.subtree_size(0, 10) == 10
    assert treemath.subtree_size(1, 10) == 6
    assert treemath.subtree_size(2, 10) == 3
    assert treemath.subtree_size(3, 10) == 3
    assert treemath.subtree_size(4, 10) == 2
    assert treemath.subtree_size(5, 10) == 1
    assert treemath.subtree_size(9, 10) == 1


def test_segment_begin_hand_values():
    assert treemath.segment_begin(0, 10) == 0
    assert treemath.segment_begin(1, 10) == 1
    assert treemath.segment_begin(2, 10) == 7
    assert treemath.segment_begin(3, 10) == 3
    assert treemath.segment_begin(4, 10) == 6
    assert treemath.segment_begin(5, 10) == 8
    assert treemath.segment_begin(6, 10) == 9


def test_pivot_pos_hand_values():
    # the walkthrough's pivots, one per segment per iteration
    assert treemath.pivot_pos(0, 10) == 6
    assert treemath.pivot_pos(1, 10) == 4
    assert treemath.pivot_pos(2, 10) == 8
    assert treemath.pivot_pos(3, 10) == 4
    assert treemath.pivot_pos(4, 10) == 7
    assert treemath.pivot_pos(5, 10) == 8
    assert treemath.pivot_pos(6, 10) == 9


def test_matches_brute_counting():
    for n in list(range(1, 160)) + [255, 256, 257, 511, 512, 513]:
        sizes = verify.brute_subtree_sizes(n)
        begins = verify.brute_segment_begins(n)
        for s in range(n):
            assert treemath.subtree_size(s, n) == sizes[s]
            assert treemath.segment_begin(s, n) == begins[s]


def test_pivot_sits_inside_its_segment():
    for n in (1, 2, 3, 10, 33, 100, 257):
        for s in range(n):
            begin = treemath.segment_begin(s, n)
            size = treemath.subtree_size(s, n)
            assert begin <= treemath.pivot_pos(s, n) < begin + size


def test_level_partition_accounting():
    # every level's segments tile the array after the finalized prefix
    for n in (1, 2, 5, 10, 64, 100, 1000):
        levels = treemath.num_levels(n)
        for l in range(levels):
            first = treemath.full_tree_size(l)
            last = min(treemath.full_tree_size(l + 1), n)
            total = first + sum(treemath.subtree_size(s, n) for s in range(first, last))
            assert total == n


def test_domain_errors():
    with pytest.raises(ValueError):
        treemath.parent(0)
    with pytest.raises(ValueError):
        treemath.level(-1)
    with pytest.raises(ValueError):
        treemath.num_levels(0)
    with pytest.raises(ValueError):
        treemath.full_tree_size(-1)
    with pytest.raises(ValueError):
        treemath.subtree_size(10, 10)
    with pytest.raises(ValueError):
        treemath.segment_begin(-1, 5)
    with pytest.raises(ValueError):
        treemath.leftmost_bottom_slot(3, 3)
