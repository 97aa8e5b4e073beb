import numpy as np
import pytest

from blockgraph import build, find_primary, merge_regions, propagate_secondary, search, verify_region
from blockgraph.bookmarks import BookmarkTable
from blockgraph.corpus import generate_corpus
from blockgraph.lz77 import parse
from blockgraph.matcher import ConfigurationError, Match, SearchStats, search_arrays
from blockgraph.suffix import SuffixIndex

from oracles import matches_brute, sellers, sellers_arrays

ENGINES = ["diagonal", "dp"]


def end_dist(matches):
    return {(m.end, m.dist) for m in matches}


def test_merge_regions_examples():
    assert merge_regions([], 3, 1, 21) == []
    regions = merge_regions([1, 2, 3, 6, 11, 19], 3, 1, 21)
    assert [(r.lo, r.hi) for r in regions] == [(1, 21)]
    assert [(r.lo, r.hi) for r in merge_regions([100], 2, 0, 1000)] == [(99, 102)]


def test_merge_regions_keeps_gaps():
    regions = merge_regions([10, 100], 2, 1, 200)
    assert [(r.lo, r.hi) for r in regions] == [(8, 13), (98, 103)]
    assert regions[1].anchors == (100,)


@pytest.mark.parametrize("engine", ENGINES)
def test_verify_region_examples(fib, engine):
    assert verify_region(b"abab", 1, b"abab", 0, engine) == [Match(4, 0, 1)]
    got = verify_region(fib, 1, b"abaababa", 0, engine)
    assert [(m.end, m.start) for m in got] == [(8, 1), (16, 9), (21, 14)]
    assert Match(4, 1, 1) in verify_region(b"abcd", 1, b"axcd", 1, engine)


@pytest.mark.parametrize("engine", ENGINES)
def test_verify_region_global_coordinates(engine):
    got = verify_region(b"xxabcxx", 101, b"abc", 0, engine)
    assert got == [Match(105, 0, 103)]


def test_verify_region_rejects_k_above_m():
    with pytest.raises(ValueError):
        verify_region(b"abc", 1, b"ab", 3)


@pytest.mark.parametrize("engine", ENGINES)
def test_verify_region_against_brute(engine):
    rng = np.random.default_rng(5)
    for _ in range(150):
        text = bytes((97 + rng.integers(0, 3, size=int(rng.integers(1, 30)))).tolist())
        pat = bytes((97 + rng.integers(0, 3, size=int(rng.integers(1, 7)))).tolist())
        k = int(rng.integers(0, len(pat) + 1))
        got = [(m.end, m.dist, m.start) for m in verify_region(text, 1, pat, k, engine)]
        assert got == matches_brute(text, pat, k)


def test_engines_agree():
    rng = np.random.default_rng(6)
    for _ in range(2000):
        sigma = int(rng.choice([2, 4, 26]))
        text = bytes((97 + rng.integers(0, sigma, size=int(rng.integers(1, 120)))).tolist())
        pat = bytes((97 + rng.integers(0, sigma, size=int(rng.integers(1, 12)))).tolist())
        k = int(rng.integers(0, min(4, len(pat)) + 1))
        assert verify_region(text, 1, pat, k, "diagonal") == verify_region(text, 1, pat, k, "dp")


def test_find_primary_fibonacci(fib, fib_graph):
    got = find_primary(fib_graph, fib_graph.bookmarks, fib_graph.parse, b"abaababa", 0)
    assert [(m.end, m.dist, m.start) for m in got] == [(8, 0, 1), (16, 0, 9), (21, 0, 14)]


def test_find_primary_single_phrase():
    g = build(b"q", bookmark_boundaries=True)
    assert find_primary(g, g.bookmarks, g.parse, b"q", 0) == []


def test_find_primary_crossing_match():
    text = b"abcdefgh" + b"abcdefgh" + b"XYZ" + b"abcdefgh"
    g = build(text, bookmark_boundaries=True)
    got = find_primary(g, g.bookmarks, g.parse, b"hXYa", 1)
    assert (20, 1) in end_dist(got)
    assert set(sellers(text, b"hXYa", 1).items()) >= {(20, 1)}


def test_find_primary_missing_bookmark():
    text = generate_corpus(200, 3, 0.05, seed=2)
    g = build(text)
    table = BookmarkTable.for_positions(g, SuffixIndex(text), [1])
    with pytest.raises(ConfigurationError):
        find_primary(g, table, g.parse, b"ACGT", 1)


def test_propagate_without_copies():
    p = parse(b"abcd")
    primary = [Match(2, 0, 1), Match(4, 1, 3)]
    assert propagate_secondary(p, primary, 2, 0) == primary


def w_text():
    rng = np.random.default_rng(8)
    w = bytes((97 + rng.permutation(26)).tolist()) * 2 + b"0123456789"
    return w, w + w


def test_propagate_interior_match_is_copied():
    w, text = w_text()
    p = parse(text)
    assert p[-1].src == 1 and p[-1].length == len(w)
    primary = [Match(34, 0, 31)]
    assert propagate_secondary(p, primary, 4, 0) == [Match(34, 0, 31), Match(34 + len(w), 0, 31 + len(w))]


def test_propagate_skips_match_near_source_start():
    w, text = w_text()
    p = parse(text)
    primary = [Match(4, 0, 1)]
    assert propagate_secondary(p, primary, 4, 0) == primary


def test_search_examples(fib, fib_graph):
    assert end_dist(search(fib_graph, b"abaababa", 0)) == {(8, 0), (16, 0), (21, 0)}
    assert search(fib_graph, fib, 0) == [Match(21, 0, 1)]
    assert end_dist(search(fib_graph, b"abab", 1)) == set(sellers(fib, b"abab", 1).items())


def test_search_rejects_k_above_m(fib_graph):
    with pytest.raises(ValueError):
        search(fib_graph, b"ab", 3)


def test_search_needs_bookmarks(fib):
    with pytest.raises(ConfigurationError):
        search(build(fib), b"ab", 0)


def test_pattern_longer_than_text():
    g = build(b"abc", bookmark_boundaries=True)
    assert end_dist(search(g, b"abcd", 1)) == {(3, 1)}
    assert search(g, b"abcde", 1) == []


@pytest.mark.parametrize("engine", ENGINES)
def test_search_against_brute_witness(engine):
    rng = np.random.default_rng(12)
    for _ in range(150):
        base = bytes((97 + rng.integers(0, 3, size=int(rng.integers(1, 12)))).tolist())
        text = (base * int(rng.integers(1, 5)))[: int(rng.integers(1, 40))] or b"a"
        g = build(text, bookmark_boundaries=True)
        pat = bytes((97 + rng.integers(0, 3, size=int(rng.integers(1, 6)))).tolist())
        k = int(rng.integers(0, len(pat) + 1))
        got = [(m.end, m.dist, m.start) for m in search(g, pat, k, engine)]
        assert got == matches_brute(text, pat, k)


def test_search_on_corpus_with_budget():
    text = generate_corpus(3000, 10, 0.01, seed=21)
    g = build(text, bookmark_boundaries=True)
    z = g.parse.z
    rng = np.random.default_rng(3)
    for m in (4, 9, 20):
        for k in range(0, 4):
            i = int(rng.integers(0, len(text) - m))
            pat = text[i : i + m]
            stats = SearchStats()
            ends, dists, _ = search_arrays(g, pat, k, stats=stats)
            want_ends, want_dists = sellers_arrays(text, pat, k)
            assert np.array_equal(ends, want_ends) and np.array_equal(dists, want_dists)
            assert stats.extracted_chars <= 2 * (m + k) * z + z
