"""Acceptance gate: one PASS/FAIL line per criterion, printed past pytest's capture."""

import io
import math
import os
import struct
import time
from functools import cache
from pathlib import Path

import numpy as np
import pytest

from blockgraph import (
    BadMagicError, BuildConfig, ChecksumError, TruncatedError, VersionMismatchError, build, load, save, validate,
)
from blockgraph.bookmarks import add_bookmarks, extract_with_bookmark_counted
from blockgraph.corpus import CorpusSpec, generate
from blockgraph.format import encode
from blockgraph.lz77 import parse
from blockgraph.matcher import SearchStats, search_arrays
from blockgraph.suffix import SuffixIndex

from oracles import lz77_greedy, sellers_arrays

FIB8 = b"abaababaabaababaababa"
RATES = [0.0, 1e-4, 1e-3, 1e-2, 5e-2]


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


@cache
def corpora() -> list[tuple[str, bytes]]:
    out = [("fib8", FIB8)]
    for i in range(20):
        n = 1 << (14 + i % 7)
        copies = [4, 8, 16, 32][i % 4]
        spec = CorpusSpec(base_size=max(1, n // copies), copies=copies, mutation_rate=RATES[i % 5], seed=100 + i,
                          alphabet=b"ACGT" if i % 3 else b"abcdefghijklmnopqrstuvwxyz")
        out.append((f"corpus{i}", generate(spec)))
    return out


@cache
def graphs():
    return [(name, text, build(text, bookmark_boundaries=True)) for name, text in corpora()]


def test_criterion_1_extraction_exactness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    total = 100_000
    per = total // len(graphs())
    wrong = asked = 0
    for idx, (_, text, g) in enumerate(graphs()):
        n = len(text)
        count = per + (total - per * len(graphs()) if idx == 0 else 0)
        lengths = np.minimum(n, np.exp(rng.uniform(0, math.log(4096), size=count)).astype(np.int64))
        eng = g.engine
        buf = np.empty(4096, dtype=np.uint8)
        raw = np.frombuffer(text, dtype=np.uint8)
        for length in lengths.tolist():
            f = int(rng.integers(1, n - length + 2))
            eng.extract(f, f + length - 1, buf)
            wrong += not np.array_equal(buf[:length], raw[f - 1 : f - 1 + length])
            asked += 1
    dt = time.perf_counter() - t0
    report(1, wrong == 0 and asked == total and len(graphs()) >= 21,
           f"{asked} queries over {len(graphs())} texts, {wrong} wrong, {dt:.1f}s")


def test_criterion_2_lz77_oracle(report):
    rng = np.random.default_rng(2)
    bad = 0
    for t in range(200):
        sigma = [2, 4, 26][t % 3]
        n = int(rng.integers(1, 2001))
        if t % 2:
            unit = (97 + rng.integers(0, sigma, size=int(rng.integers(1, 60)))).tolist()
            body = (unit * (n // len(unit) + 1))[:n]
            for p in rng.integers(0, n, size=max(1, n // 100)).tolist():
                body[p] = 97 + int(rng.integers(0, sigma))
        else:
            body = (97 + rng.integers(0, sigma, size=n)).tolist()
        text = bytes(body)
        got = [("lit", p.char) if p.is_literal else ("copy", p.src, p.length) for p in parse(text)]
        bad += got != lz77_greedy(text)
    fib_z = parse(FIB8).z
    report(2, bad == 0 and fib_z == 7, f"200 strings, {bad} mismatches; Fibonacci-8 z={fib_z}")


def test_criterion_3_structural_bound(report):
    worst = 0.0
    failures = []
    for name, text, g in graphs():
        try:
            rep = validate(g, text)
        except AssertionError as exc:
            failures.append(f"{name}: {exc}")
            continue
        worst = max(worst, rep.max_internal / (3 * rep.z))
    report(3, not failures, f"{len(graphs())} graphs validated, max internal/(3z) = {worst:.3f} {failures[:1]}")


def _container_size(text: bytes) -> int:
    return len(encode(build(text)).data)


def test_criterion_4_compression(report):
    base = 256 * 1024
    small = generate(CorpusSpec(base_size=base, copies=64, substitutions=2, seed=4))
    s64 = _container_size(small)
    del small
    large = generate(CorpusSpec(base_size=base, copies=256, substitutions=2, seed=4))
    s256 = _container_size(large)
    ratio = s64 / (64 * base)
    growth = s256 / s64
    report(4, ratio <= 0.35 and growth <= 1.5,
           f"64 copies: {s64} bytes ({100 * ratio:.2f}% of raw); 256 copies: {s256} bytes (x{growth:.2f})")


def test_criterion_5_reference_corpus(report, capsys):
    path = Path(os.environ.get("BLOCKGRAPH_EINSTEIN", Path(__file__).parent / "data" / "einstein.en.txt"))
    if not path.exists():
        with capsys.disabled():
            print(f"\ncriterion 5: SKIP  {path} not present")
        pytest.skip(f"{path} not present")
    size = len(encode(build(path.read_bytes(), BuildConfig(truncate_block_len=4))).data)
    target = 3_969_392
    report(5, abs(size - target) <= 0.25 * target, f"{size} bytes vs {target} (+-25%)")


def _search_texts():
    specs = [
        CorpusSpec(base_size=5000, copies=10, mutation_rate=0.01, seed=61),
        CorpusSpec(base_size=2500, copies=20, mutation_rate=0.002, seed=62),
        CorpusSpec(base_size=10000, copies=5, mutation_rate=0.03, seed=63, alphabet=b"abcdefghijklmnopqrstuvwxyz"),
        CorpusSpec(base_size=1000, copies=50, mutation_rate=0.0005, seed=64, alphabet=b"ab"),
    ]
    return [generate(s) for s in specs]


def _edited(rng, text: bytes, m: int, edits: int, sigma: bytes) -> bytes:
    i = int(rng.integers(0, len(text) - m + 1))
    pat = bytearray(text[i : i + m])
    for _ in range(edits):
        op = int(rng.integers(0, 3))
        p = int(rng.integers(0, len(pat)))
        c = sigma[int(rng.integers(0, len(sigma)))]
        if op == 0:
            pat[p] = c
        elif op == 1 and len(pat) > 1:
            del pat[p]
        else:
            pat.insert(p, c)
    return bytes(pat[:m]) if len(pat) >= m else bytes(pat) + bytes([sigma[0]]) * (m - len(pat))


@cache
def search_outcome():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    texts = _search_texts()
    built = [(t, build(t, bookmark_boundaries=True)) for t in texts]
    wrong = budget_bad = searches = 0
    worst_ratio = 0.0
    for m in (4, 8, 16, 32):
        for k in range(5):
            for trial in range(500):
                text, g = built[trial % len(built)]
                sigma = bytes(sorted(set(text[:2000])))
                if trial % 2 == 0:
                    pat = _edited(rng, text, m, int(rng.integers(0, k + 2)), sigma)
                else:
                    pat = bytes(sigma[j] for j in rng.integers(0, len(sigma), size=m).tolist())
                stats = SearchStats()
                ends, dists, _ = search_arrays(g, pat, k, stats=stats)
                want_ends, want_dists = sellers_arrays(text, pat, k)
                wrong += not (np.array_equal(ends, want_ends) and np.array_equal(dists, want_dists))
                z = g.parse.z
                cap = 2 * (m + k) * z + z
                budget_bad += stats.extracted_chars > cap
                worst_ratio = max(worst_ratio, stats.extracted_chars / cap)
                searches += 1
    return searches, wrong, budget_bad, worst_ratio, time.perf_counter() - t0


def test_criterion_6_search_oracle(report):
    searches, wrong, _, _, dt = search_outcome()
    report(6, wrong == 0, f"{searches} searches over 20 (m, k) classes, {wrong} differ from the DP oracle, {dt:.1f}s")


def test_criterion_7_bookmark_locality(report):
    text = generate(CorpusSpec(base_size=1 << 15, copies=32, mutation_rate=0.001, seed=7))
    n = len(text)
    g = build(text)
    rng = np.random.default_rng(7)
    positions = rng.integers(1, n + 1, size=64)
    table = add_bookmarks(g, SuffixIndex(text), positions)
    worst_bm = worst_root = 0.0
    bad = 0
    for e in range(13):
        L = 1 << e
        for pos in positions.tolist():
            bm = table.get(pos)
            for side in (0, 1):
                f = pos - L + 1 if side == 0 else pos
                f = min(max(1, f), n - L + 1)
                if not f <= pos <= f + L:
                    f = min(pos, n - L + 1)
                data, visits = extract_with_bookmark_counted(g, bm, f, f + L - 1)
                bad += data != text[f - 1 : f + L - 1]
                worst_bm = max(worst_bm, visits / (8 * L + 16))
                data, visits = g.extract_counted(f, f + L - 1)
                bad += data != text[f - 1 : f + L - 1]
                worst_root = max(worst_root, visits / (8 * L + 16 * math.log2(n)))
    report(7, bad == 0 and worst_bm <= 1 and worst_root <= 1,
           f"n={n}: bookmarked visits <= {worst_bm:.2f}*(8L+16), root visits <= {worst_root:.2f}*(8L+16 log n)")


def test_criterion_8_extraction_budget(report):
    searches, _, budget_bad, worst, _ = search_outcome()
    report(8, budget_bad == 0, f"{searches} searches, {budget_bad} over 2(m+k)z+z, worst {worst:.3f} of the cap")


def _answers(g, text, rng):
    n = len(text)
    ranges = []
    for _ in range(50):
        f = int(rng.integers(1, n + 1))
        ranges.append((f, int(rng.integers(f, min(n, f + 500) + 1))))
    pats = [text[max(0, n // 2 - 3) : n // 2 + 3] or text, text[:4]]
    found = [tuple(map(bytes, search_arrays(g, p, min(1, len(p))))) for p in pats]
    return [g.extract(f, l) for f, l in ranges], found


def test_criterion_9_round_trip(report):
    mismatched = []
    for name, text, g in graphs():
        sink = io.BytesIO()
        save(g, sink=sink)
        data = sink.getvalue()
        g2, parse2, marks2 = load(data)
        again = io.BytesIO()
        save(g2, sink=again)
        same = (
            again.getvalue() == data
            and _answers(g, text, np.random.default_rng(9)) == _answers(g2, text, np.random.default_rng(9))
            and parse2.z == g.parse.z
            and marks2 == g.bookmarks
        )
        if not same:
            mismatched.append(name)
    data = io.BytesIO()
    save(graphs()[3][2], sink=data)
    data = data.getvalue()
    version = bytearray(data)
    struct.pack_into("<H", version, 4, 99)
    flipped = bytearray(data)
    flipped[len(data) // 2] ^= 0x40
    cases = [
        (b"ZZ01" + data[4:], BadMagicError),
        (bytes(version), VersionMismatchError),
        (bytes(flipped), ChecksumError),
        (data[: len(data) // 3], TruncatedError),
    ]
    rejected = 0
    for blob, err in cases:
        try:
            load(blob)
        except err:
            rejected += 1
        except Exception:
            pass
    report(9, not mismatched and rejected == len(cases),
           f"{len(graphs())} containers identical on reload {mismatched}; {rejected}/{len(cases)} corruptions rejected")
