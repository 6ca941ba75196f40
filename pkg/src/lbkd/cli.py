"""Command-line interface.

Subcommands::

    lbkd build    --input points.csv --dims 2 --mode widest --output tree.csv
    lbkd query    --tree tree.csv --point 45,40 --knn 3
    lbkd query    --tree tree.csv --point 45,40 --radius 10
    lbkd bench    --n 1000000 --dims 4 --mode round-robin --seed 0 --reps 3
    lbkd selftest

Point files are headerless CSV, one point per row (``--payload`` adds one
trailing integer column).  Tree files are CSV with a header row naming the
columns ``coord_0..coord_{k-1}[,split_dim][,payload]``; node ``i`` of the
level-order layout is data row ``i``.  An empty tree writes a zero-byte
file.  Query results print one ``index,dist2`` line per neighbor.  Bench
prints one JSON line.  All data errors exit 1 with a message on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import builder, queries, verify, widest


def format_scalar(value: float) -> str:
    """Shortest faithful text for a finite float; integral values print bare."""
    f = float(value)
    return str(int(f)) if f == int(f) else repr(f)


def _build_fn(mode: str):
    return widest.build_widest if mode == "widest" else builder.build_round_robin


def read_points(path: str, dims: int, with_payload: bool = False):
    """Parse a headerless CSV of points; returns (coords, payload or None)."""
    rows: list[list[float]] = []
    payloads: list[int] = []
    expect = dims + (1 if with_payload else 0)
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != expect:
                raise ValueError(
                    f"{path}:{ln}: expected {expect} comma-separated fields, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts[:dims]])
            except ValueError:
                raise ValueError(f"{path}:{ln}: unparseable coordinate") from None
            if with_payload:
                try:
                    payloads.append(int(parts[dims]))
                except ValueError:
                    raise ValueError(f"{path}:{ln}: unparseable payload") from None
    coords = np.array(rows, dtype=np.float64).reshape(len(rows), dims)
    payload = np.array(payloads, dtype=np.int64) if with_payload else None
    return coords, payload


def write_tree(path: str, tree: builder.KdTree, with_payload: bool = False) -> None:
    """Write a tree as CSV; data row i is node i of the level-order layout."""
    if tree.n == 0:
        open(path, "w").close()
        return
    header = [f"coord_{j}" for j in range(tree.k)]
    if tree.split_dims is not None:
        header.append("split_dim")
    if with_payload:
        header.append("payload")
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(tree.n):
            fields = [format_scalar(v) for v in tree.coords[i]]
            if tree.split_dims is not None:
                fields.append(str(int(tree.split_dims[i])))
            if with_payload:
                fields.append(str(int(tree.payload[i])))
            fh.write(",".join(fields) + "\n")


def read_tree(path: str) -> builder.KdTree:
    """Read a tree CSV written by :func:`write_tree`."""
    with open(path) as fh:
        lines = [line.strip() for line in fh]
    lines = [line for line in lines if line]
    if not lines:
        return builder.KdTree(
            np.empty((0, 1), dtype=np.float64), np.empty(0, dtype=np.int64)
        )
    header = lines[0].split(",")
    k = 0
    while k < len(header) and header[k] == f"coord_{k}":
        k += 1
    if k == 0:
        raise ValueError(f"{path}: header must start with coord_0")
    rest = header[k:]
    has_dims = bool(rest) and rest[0] == "split_dim"
    if has_dims:
        rest = rest[1:]
    has_payload = bool(rest) and rest[0] == "payload"
    if has_payload:
        rest = rest[1:]
    if rest:
        raise ValueError(f"{path}: unrecognized columns {rest}")
    n = len(lines) - 1
    coords = np.empty((n, k), dtype=np.float64)
    split_dims = np.zeros(n, dtype=np.min_scalar_type(max(k - 1, 0))) if has_dims else None
    payload = np.arange(n, dtype=np.int64)
    expect = k + int(has_dims) + int(has_payload)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != expect:
            raise ValueError(
                f"{path}:{i + 2}: expected {expect} fields, got {len(parts)}"
            )
        try:
            coords[i] = [float(p) for p in parts[:k]]
            at = k
            if has_dims:
                d = int(parts[at])
                if not 0 <= d < k:
                    raise ValueError
                split_dims[i] = d
                at += 1
            if has_payload:
                payload[i] = int(parts[at])
        except ValueError:
            raise ValueError(f"{path}:{i + 2}: unparseable field") from None
    if not np.all(np.isfinite(coords)):
        raise ValueError(f"{path}: tree coordinates must be finite")
    return builder.KdTree(coords, payload, split_dims)


def cmd_build(args) -> int:
    coords, payload = read_points(args.input, args.dims, args.payload)
    tree = _build_fn(args.mode)(coords, args.dims, payload=payload)
    write_tree(args.output, tree, with_payload=args.payload)
    print(f"{tree.n} nodes, {args.dims} dims, {args.mode} -> {args.output}")
    return 0


def cmd_query(args) -> int:
    tree = read_tree(args.tree)
    try:
        point = [float(p) for p in args.point.split(",")]
    except ValueError:
        raise ValueError(f"unparseable query point {args.point!r}") from None
    if args.knn is not None:
        for nb in queries.knn(tree, point, args.knn):
            print(f"{nb.index},{format_scalar(nb.dist2)}")
    else:
        indices = queries.radius_query(tree, point, args.radius)
        q = np.asarray(point, dtype=np.float64)
        for i in indices:
            d2 = 0.0
            for j in range(tree.k):
                t = q[j] - tree.coords[i, j]
                d2 += t * t
            print(f"{int(i)},{format_scalar(d2)}")
    return 0


def cmd_bench(args) -> int:
    if args.n < 1 or args.dims < 1 or args.reps < 1:
        raise ValueError("--n, --dims, and --reps must all be at least 1")
    rng = np.random.default_rng(args.seed)
    coords = rng.random((args.n, args.dims))
    build = _build_fn(args.mode)
    build(coords, args.dims)  # warmup: JIT compilation and caches
    total = 0.0
    for _ in range(args.reps):
        t0 = time.perf_counter()
        build(coords, args.dims)
        total += time.perf_counter() - t0
    record = {
        "n": args.n,
        "k": args.dims,
        "mode": args.mode,
        "seed": args.seed,
        "reps": args.reps,
        "millis": total / args.reps * 1000.0,
    }
    print(json.dumps(record))
    return 0


def _selftest_walkthrough() -> list[str]:
    return verify.check_walkthrough()


def _selftest_treemath() -> list[str]:
    from . import treemath

    for n in list(range(1, 130)) + [255, 256, 257]:
        sizes = verify.brute_subtree_sizes(n)
        begins = verify.brute_segment_begins(n)
        for s in range(n):
            if treemath.subtree_size(s, n) != sizes[s]:
                return [f"subtree_size({s}, {n}) != counted size {sizes[s]}"]
            if treemath.segment_begin(s, n) != begins[s]:
                return [f"segment_begin({s}, {n}) != summed begin {begins[s]}"]
    return []


def _selftest_construction() -> list[str]:
    rng = np.random.default_rng(20240916)
    for n in list(range(1, 21)) + [31, 32, 33, 64]:
        for k in (1, 2, 3):
            coords = np.stack(
                [rng.permutation(n).astype(np.float64) for _ in range(k)], axis=1
            )
            got = builder.build_round_robin(coords, k)
            want = verify.reference_build(coords, k)
            if not np.array_equal(got.coords, want.coords) or not np.array_equal(
                got.payload, want.payload
            ):
                return [f"round-robin build diverges from reference (n={n}, k={k})"]
            got_w = widest.build_widest(coords, k)
            want_w = verify.reference_build(coords, k, mode="widest")
            if (
                not np.array_equal(got_w.coords, want_w.coords)
                or not np.array_equal(got_w.split_dims, want_w.split_dims)
            ):
                return [f"widest build diverges from reference (n={n}, k={k})"]
    return []


def _selftest_duplicates() -> list[str]:
    rng = np.random.default_rng(7)
    for trial in range(20):
        n = int(rng.integers(1, 200))
        k = int(rng.integers(1, 5))
        coords = rng.integers(0, 3, size=(n, k)).astype(np.float64)
        for name, build in (("round-robin", builder.build_round_robin), ("widest", widest.build_widest)):
            report = verify.check_valid(build(coords, k))
            if not report.valid:
                return [f"{name} tree invalid on duplicate-heavy input: {report.message}"]
    return []


def _selftest_split_dims() -> list[str]:
    rng = np.random.default_rng(11)
    for trial in range(10):
        n = int(rng.integers(1, 400))
        k = int(rng.integers(2, 5))
        tree = widest.build_widest(rng.random((n, k)), k)
        lo, hi = verify.brute_subtree_boxes(tree)
        want = np.argmax(hi - lo, axis=1)
        if not np.array_equal(tree.split_dims.astype(np.int64), want):
            return [f"stored split dims disagree with subtree boxes (n={n}, k={k})"]
    return []


def _selftest_queries() -> list[str]:
    rng = np.random.default_rng(13)
    for trial in range(15):
        n = int(rng.integers(1, 150))
        k = int(rng.integers(1, 4))
        coords = rng.random((n, k))
        build = widest.build_widest if trial % 2 else builder.build_round_robin
        tree = build(coords, k)
        q = rng.random(k)
        for m in (1, 5):
            if queries.knn(tree, q, m) != verify.brute_knn(tree.coords, q, m):
                return [f"knn diverges from scan (n={n}, k={k}, m={m})"]
        r = float(rng.random())
        got = queries.radius_query(tree, q, r)
        want = verify.brute_radius(tree.coords, q, r)
        if not np.array_equal(got, want):
            return [f"radius query diverges from scan (n={n}, k={k}, r={r})"]
    return []


def cmd_selftest(args) -> int:
    checks = (
        ("walkthrough fixtures", _selftest_walkthrough),
        ("tree index math", _selftest_treemath),
        ("construction vs reference", _selftest_construction),
        ("duplicate-heavy validity", _selftest_duplicates),
        ("widest split dims", _selftest_split_dims),
        ("queries vs scans", _selftest_queries),
    )
    failed = False
    for name, fn in checks:
        problems = fn()
        if problems:
            failed = True
            print(f"FAIL {name}: {problems[0]}")
        else:
            print(f"ok   {name}")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lbkd",
        description="Left-balanced complete k-d trees in flat arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a tree from a CSV of points")
    p.add_argument("--input", required=True, help="headerless CSV, one point per row")
    p.add_argument("--dims", type=int, required=True, help="coordinates per point")
    p.add_argument("--mode", choices=("round-robin", "widest"), default="round-robin")
    p.add_argument("--output", required=True, help="tree CSV to write")
    p.add_argument(
        "--payload",
        action="store_true",
        help="input rows carry a trailing integer payload column",
    )
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("query", help="query a stored tree")
    p.add_argument("--tree", required=True, help="tree CSV from the build command")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--knn", type=int, help="number of nearest neighbors")
    group.add_argument("--radius", type=float, help="include all points within this distance")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="time tree construction on random points")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--mode", choices=("round-robin", "widest"), default="round-robin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=3, help="timed builds to average over")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("selftest", help="run the built-in correctness checks")
    p.set_defaults(fn=cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
