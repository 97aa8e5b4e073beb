"""Command-line front end.

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import numpy as np

from . import format as bgformat
from .builder import BuildConfig, BuildError, build
from .corpus import CorpusSpec, generate
from .matcher import ConfigurationError, search_arrays

log = logging.getLogger("blockgraph")


class UsageError(Exception):
    pass


def _load(path):
    graph, _, _ = bgformat.load(path)
    return graph


def _check_range(graph, lo: int, hi: int):
    if not 1 <= lo <= hi <= graph.n:
        raise UsageError(f"range [{lo}, {hi}] must satisfy 1 <= from <= to <= n = {graph.n}")


def run_build(args) -> int:
    with open(args.input, "rb") as fh:
        text = fh.read()
    if not text:
        raise BuildError("empty input")
    config = BuildConfig(truncate_block_len=args.trunc, flat_top_depth=args.flat_top)
    t0 = time.perf_counter()
    graph = build(text, config, bookmark_boundaries=args.bookmark_boundaries)
    size = bgformat.save(graph, sink=args.output)
    elapsed = time.perf_counter() - t0
    print(f"n={graph.n}")
    print(f"z={graph.parse.z}")
    print(f"height={graph.height} trunc_depth={graph.trunc_depth} flat_top_depth={graph.flat_top_depth}")
    for row in graph.level_stats():
        print(f"level {row['depth']}: block={row['block_size']} internal={row['internal']} leaves={row['leaves']}")
    print(f"bytes={size}")
    print(f"bits_per_char={8 * size / graph.n:.4f}")
    print(f"seconds={elapsed:.2f}")
    return 0


def run_extract(args) -> int:
    graph = _load(args.index)
    _check_range(graph, args.start, args.stop)
    sys.stdout.buffer.write(graph.extract(args.start, args.stop))
    sys.stdout.buffer.flush()
    return 0


def run_access(args) -> int:
    graph = _load(args.index)
    _check_range(graph, args.pos, args.pos)
    sys.stdout.buffer.write(bytes([graph.access(args.pos)]))
    sys.stdout.buffer.flush()
    return 0


def run_search(args) -> int:
    if args.pattern_file is not None:
        with open(args.pattern_file, "rb") as fh:
            pattern = fh.read().rstrip(b"\r\n")
    else:
        pattern = args.pattern.encode()
    if not pattern:
        raise UsageError("pattern must be non-empty")
    if not 0 <= args.k <= len(pattern):
        raise UsageError(f"k must lie in [0, m]; got k={args.k}, m={len(pattern)}")
    graph = _load(args.index)
    ends, dists, starts = search_arrays(graph, pattern, args.k, engine=args.engine)
    out = sys.stdout
    if args.format == "json":
        rows = [{"end": int(e), "dist": int(d), "witness_start": int(s)} for e, d, s in zip(ends, dists, starts)]
        json.dump(rows, out)
        out.write("\n")
    else:
        out.writelines(f"{e}\t{d}\t{s}\n" for e, d, s in zip(ends.tolist(), dists.tolist(), starts.tolist()))
    return 0


def run_gen_corpus(args) -> int:
    if args.base_size < 1 or args.copies < 1:
        raise UsageError("--base-size and --copies must be at least 1")
    if not 0.0 <= args.mutation_rate <= 1.0:
        raise UsageError("--mutation-rate must lie in [0, 1]")
    spec = CorpusSpec(
        base_size=args.base_size,
        copies=args.copies,
        mutation_rate=args.mutation_rate,
        seed=args.seed,
        alphabet=args.alphabet.encode(),
        substitutions=args.substitutions,
        indel_rate=args.indel_rate,
    )
    data = generate(spec)
    with open(args.output, "wb") as fh:
        fh.write(data)
    print(f"wrote {len(data)} bytes to {args.output}")
    return 0


def run_stats(args) -> int:
    with open(args.index, "rb") as fh:
        data = fh.read()
    graph, parse, marks = bgformat.decode(data)
    enc = bgformat.encode(graph, parse, marks)
    print(f"n={graph.n} z={parse.z if parse is not None else 'n/a'} height={graph.height}")
    print(f"trunc_depth={graph.trunc_depth} flat_top_depth={graph.flat_top_depth} "
          f"truncate_block_len={graph.truncate_block_len}")
    print(f"bookmarks={len(marks) if marks is not None else 0}")
    print("sections:")
    for name, size in enc.sections:
        print(f"  {name:<10} {size:>12} bytes")
    print(f"  {'total':<10} {len(data):>12} bytes  ({8 * len(data) / graph.n:.4f} bits/char)")
    print("levels:")
    for row in graph.level_stats():
        print(f"  depth {row['depth']:>2} block {row['block_size']:>10} internal {row['internal']:>9} "
              f"leaves {row['leaves']:>9} bits {row['bits']:>11}")
    return 0


def _bench_queries(graph, rng, length: int, count: int, bookmarked: bool):
    from .bookmarks import extract_pieces

    n = graph.n
    length = min(length, n)
    if not bookmarked:
        starts = rng.integers(1, n - length + 2, size=count)
        out = np.empty(length, dtype=np.uint8)
        eng = graph.engine
        for f in starts.tolist():
            t0 = time.perf_counter_ns()
            eng.extract(f, f + length - 1, out)
            yield time.perf_counter_ns() - t0
        return
    table = graph.bookmarks
    if table is None or len(table) == 0:
        raise ConfigurationError("index has no bookmarks; rebuild with --bookmark-boundaries")
    rows = rng.integers(0, len(table), size=count)
    shifts = rng.integers(0, length + 1, size=count)
    args = graph.engine.args
    out = np.empty(length, dtype=np.uint8)
    one = np.zeros(1, dtype=np.int64)
    for row, shift in zip(rows.tolist(), shifts.tolist()):
        pos = int(table.positions[row])
        # a range of the requested length touching the bookmark
        f = min(max(1, pos - length + 1 + shift), n - length + 1)
        r, a, p, b = one.copy(), one.copy(), one.copy(), one.copy()
        r[0], a[0], p[0], b[0] = row, f, pos, f + length - 1
        t0 = time.perf_counter_ns()
        extract_pieces(args, table.windows, table.depths[0], table.left_node, table.left_off,
                       table.right_node, table.right_off, r, p, a, b, out)
        yield time.perf_counter_ns() - t0


def run_bench(args) -> int:
    graph = _load(args.index)
    try:
        lengths = [int(x) for x in args.lengths.split(",") if x]
    except ValueError as exc:
        raise UsageError("--lengths must be comma-separated integers") from exc
    if not lengths or min(lengths) < 1:
        raise UsageError("--lengths needs positive integers")
    rng = np.random.default_rng(args.seed)
    # compile kernels before timing
    for _ in _bench_queries(graph, np.random.default_rng(0), 1, 1, args.bookmarked):
        pass
    rows = []
    for length in lengths:
        eff = min(length, graph.n)
        ns = np.fromiter(_bench_queries(graph, rng, length, args.queries, args.bookmarked), dtype=np.int64)
        per_char_us = ns / 1000.0 / eff
        rows.append(
            {
                "length": length,
                "mean": float(per_char_us.mean()),
                "p50": float(np.percentile(per_char_us, 50)),
                "p99": float(np.percentile(per_char_us, 99)),
                "chars_per_sec": float(eff * ns.size / (ns.sum() / 1e9)) if ns.sum() else float("inf"),
            }
        )
    with open(args.csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["length", "mean", "p50", "p99", "chars_per_sec"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
    for row in rows:
        print(f"length={row['length']} mean_us_per_char={row['mean']:.4f} chars_per_sec={row['chars_per_sec']:.0f}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockgraph", description="Block graph text index over the LZ77 parse.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a BG01 index from a file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--trunc", type=int, default=4, help="block length at the deepest level (power of two >= 4)")
    p.add_argument("--flat-top", type=int, default=0, help="drop the levels above this depth")
    p.add_argument("--bookmark-boundaries", action="store_true", help="store bookmarks at phrase boundaries")
    p.set_defaults(func=run_build)

    p = sub.add_parser("extract", help="print text[from..to] (1-based, inclusive)")
    p.add_argument("--index", required=True)
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="stop", type=int, required=True)
    p.set_defaults(func=run_extract)

    p = sub.add_parser("access", help="print the character at a 1-based position")
    p.add_argument("--index", required=True)
    p.add_argument("--pos", type=int, required=True)
    p.set_defaults(func=run_access)

    p = sub.add_parser("search", help="approximate pattern search within edit distance k")
    p.add_argument("--index", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern")
    src.add_argument("--pattern-file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--engine", choices=("diagonal", "dp"), default="diagonal")
    p.set_defaults(func=run_search)

    p = sub.add_parser("gen-corpus", help="write a synthetic repetitive corpus")
    p.add_argument("--base-size", type=int, required=True)
    p.add_argument("--copies", type=int, required=True)
    p.add_argument("--mutation-rate", type=float, default=0.0)
    p.add_argument("--substitutions", type=int, default=None, help="exact substitutions per copy")
    p.add_argument("--indel-rate", type=float, default=0.0)
    p.add_argument("--alphabet", default="ACGT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=run_gen_corpus)

    p = sub.add_parser("stats", help="size breakdown of an index")
    p.add_argument("--index", required=True)
    p.set_defaults(func=run_stats)

    p = sub.add_parser("bench", help="time random extractions and write a CSV")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", type=int, default=10000)
    p.add_argument("--lengths", default="1,4,16,64,256,1024,4096")
    p.add_argument("--bookmarked", action="store_true", help="extract next to stored bookmarks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=run_bench)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, BuildError, bgformat.FormatError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
