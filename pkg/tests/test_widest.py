"""Widest-dimension variant: packing, boxes, split dims, reference equality."""

import numpy as np
import pytest

from lbkd import builder, treemath, verify, widest


def test_dim_bits():
    assert widest.dim_bits_for(1) == 0
    assert widest.dim_bits_for(2) == 1
    assert widest.dim_bits_for(3) == 2
    assert widest.dim_bits_for(4) == 2
    assert widest.dim_bits_for(5) == 3
    with pytest.raises(ValueError):
        widest.dim_bits_for(0)


def test_pack_unpack_roundtrip():
    for bits in (0, 1, 2, 3):
        for node in (0, 1, 5, 1000):
            for dim in range(max(1 << bits, 1)):
                value = widest.pack_tag(node, dim, bits)
                assert widest.unpack_tag(value, bits) == (node, dim)
    with pytest.raises(ValueError):
        widest.pack_tag(3, 4, 2)
    with pytest.raises(ValueError):
        widest.pack_tag(3, 1, 0)


def test_pack_monotone_in_node():
    # sorting by raw packed tags groups whole nodes, dims never interleave
    for bits in (0, 1, 2, 3):
        top_dim = max((1 << bits) - 1, 0)
        assert widest.pack_tag(6, top_dim, bits) < widest.pack_tag(7, 0, bits)


def test_world_bounds_and_widest_dim():
    coords = np.array([[0.0, 5.0], [4.0, 5.0], [2.0, 11.0]])
    box = widest.world_bounds(coords)
    assert box.lo.tolist() == [0.0, 5.0]
    assert box.hi.tolist() == [4.0, 11.0]
    assert widest.widest_dim(box) == 1
    # ties resolve to the lowest dimension index
    square = widest.world_bounds(np.array([[0.0, 0.0], [3.0, 3.0]]))
    assert widest.widest_dim(square) == 0
    with pytest.raises(ValueError):
        widest.world_bounds(np.empty((0, 2)))


def test_root_splits_widest_extent(backend):
    coords = np.array([[0.0, 0.0], [1.0, 10.0], [0.5, 5.0]])
    tree = widest.build_widest(coords, 2)
    assert tree.split_dim_of(0) == 1


def test_split_dims_match_brute_boxes(backend):
    rng = np.random.default_rng(101)
    for _ in range(25):
        n = int(rng.integers(1, 800))
        k = int(rng.integers(2, 5))
        tree = widest.build_widest(rng.random((n, k)), k)
        lo, hi = verify.brute_subtree_boxes(tree)
        assert np.array_equal(
            tree.split_dims.astype(np.int64), np.argmax(hi - lo, axis=1)
        ), (n, k)


def test_split_dims_match_boxes_under_duplicates(backend):
    # degenerate boxes force the tie rule everywhere
    rng = np.random.default_rng(103)
    for _ in range(20):
        n = int(rng.integers(1, 300))
        k = int(rng.integers(2, 5))
        coords = rng.integers(0, 2, size=(n, k)).astype(np.float64)
        tree = widest.build_widest(coords, k)
        assert verify.check_valid(tree).valid
        lo, hi = verify.brute_subtree_boxes(tree)
        assert np.array_equal(
            tree.split_dims.astype(np.int64), np.argmax(hi - lo, axis=1)
        )


def test_subtree_bounds_walk_equals_brute(backend):
    rng = np.random.default_rng(107)
    coords = rng.random((200, 3))
    tree = widest.build_widest(coords, 3)
    world = widest.world_bounds(tree.coords)
    lo, hi = verify.brute_subtree_boxes(tree)
    for node in range(tree.n):
        box = widest.subtree_bounds(tree.coords, tree.split_dims, node, world)
        assert np.array_equal(box.lo, lo[node]), node
        assert np.array_equal(box.hi, hi[node]), node


def test_matches_reference_on_distinct_coords(backend):
    rng = np.random.default_rng(109)
    for n in list(range(1, 40)) + [63, 64, 65, 255, 256, 257]:
        for k in (2, 3, 4):
            coords = np.stack(
                [rng.permutation(n).astype(np.float64) for _ in range(k)], axis=1
            )
            got = widest.build_widest(coords, k)
            want = verify.reference_build(coords, k, mode="widest")
            assert np.array_equal(got.coords, want.coords), (n, k)
            assert np.array_equal(got.payload, want.payload), (n, k)
            assert np.array_equal(
                got.split_dims.astype(np.int64),
                want.split_dims.astype(np.int64),
            ), (n, k)


def test_one_dimension_degenerates_to_round_robin(backend):
    rng = np.random.default_rng(113)
    coords = rng.random((100, 1))
    a = widest.build_widest(coords, 1)
    b = builder.build_round_robin(coords, 1)
    assert np.array_equal(a.coords, b.coords)
    assert np.all(a.split_dims == 0)


def test_single_point_and_empty():
    one = widest.build_widest(np.array([[2.0, 9.0]]), 2)
    assert one.split_dims.tolist() == [0]
    assert one.split_dim_of(0) == 0
    empty = widest.build_widest(np.empty((0, 4)), 4)
    assert empty.n == 0
    assert empty.split_dims.shape == (0,)


def test_valid_with_duplicates(backend):
    rng = np.random.default_rng(127)
    for _ in range(40):
        n = int(rng.integers(1, 300))
        k = int(rng.integers(1, 5))
        coords = rng.integers(0, 3, size=(n, k)).astype(np.float64)
        report = verify.check_valid(widest.build_widest(coords, k))
        assert report.valid, report.message


def test_skip_prefix_changes_nothing(backend):
    rng = np.random.default_rng(131)
    for _ in range(15):
        n = int(rng.integers(1, 600))
        coords = rng.random((n, 3))
        a = widest.build_widest(coords, 3)
        b = widest.build_widest(coords, 3, skip_prefix=True)
        assert np.array_equal(a.coords, b.coords)
        assert np.array_equal(a.split_dims, b.split_dims)


def test_backends_agree(monkeypatch):
    pytest.importorskip("numba")
    rng = np.random.default_rng(137)
    for n in (2, 33, 257, 1000):
        coords = rng.random((n, 4))
        monkeypatch.setenv("LBKD_BACKEND", "numpy")
        a = widest.build_widest(coords, 4)
        monkeypatch.setenv("LBKD_BACKEND", "numba")
        b = widest.build_widest(coords, 4)
        assert np.array_equal(a.coords, b.coords)
        assert np.array_equal(a.split_dims, b.split_dims)


def test_capacity_rejected_before_allocation():
    # 2^29 points at k=3 pack to 2^31 tag values, one past the last index
    too_many = np.broadcast_to(np.zeros((1, 3)), (2**29, 3))
    with pytest.raises(ValueError):
        widest.build_widest(too_many)


def test_leaf_split_dims_are_recorded():
    rng = np.random.default_rng(139)
    coords = rng.random((1000, 3))
    tree = widest.build_widest(coords, 3)
    lo, hi = verify.brute_subtree_boxes(tree)
    first_leaf = treemath.full_tree_size(tree.levels - 1)
    want = np.argmax((hi - lo)[first_leaf:], axis=1)
    assert np.array_equal(tree.split_dims[first_leaf:].astype(np.int64), want)
