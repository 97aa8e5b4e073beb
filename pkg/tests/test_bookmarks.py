import numpy as np
import pytest

from blockgraph import add_bookmark, build, extract_with_bookmark
from blockgraph.bookmarks import BookmarkError, add_bookmarks, boundary_positions, extract_with_bookmark_counted
from blockgraph.builder import BuildConfig
from blockgraph.corpus import generate_corpus
from blockgraph.lz77 import parse

from oracles import first_occurrence


def covered(graph, d, target, length, text):
    """Text read from a target's node and offset."""
    o = int(graph.node_ordinals(d)[target.node])
    lo, _ = graph.node_interval(d, o)
    start = lo + target.offset
    return text[start - 1 : start - 1 + length], start


def test_right_target_window_four(fib, fib_graph):
    bm = add_bookmark(fib_graph, fib, 11)
    lv = next(lv for lv in bm.levels if lv.window == 4)
    assert fib_graph.node_interval(lv.depth, int(fib_graph.node_ordinals(lv.depth)[lv.right.node])) == (1, 8)
    assert lv.right.offset == 2


def test_right_target_window_two(fib, fib_graph):
    bm = add_bookmark(fib_graph, fib, 11)
    lv = next(lv for lv in bm.levels if lv.window == 2)
    got, start = covered(fib_graph, lv.depth, lv.right, 2, fib)
    assert got == b"aa"
    assert start == first_occurrence(fib, 11, 12) == 3
    assert fib_graph.level(lv.depth).B.access(lv.right.node) == 1


def test_targets_hold_leftmost_copies():
    text = generate_corpus(3000, 5, 0.01, seed=4)
    g = build(text)
    for pos in (1, 2, 17, 3000, 9001, len(text)):
        bm = add_bookmark(g, text, pos)
        for lv in bm.levels:
            w = lv.window
            r_len = min(w, len(text) - pos + 1)
            got, start = covered(g, lv.depth, lv.right, r_len, text)
            assert got == text[pos - 1 : pos - 1 + r_len]
            assert start == first_occurrence(text, pos, pos + r_len - 1)
            assert lv.right.offset + r_len <= g.block_size(lv.depth)
            if pos - w < 0:
                assert lv.left is None
            else:
                got, start = covered(g, lv.depth, lv.left, w, text)
                assert got == text[pos - w : pos]
                assert start == first_occurrence(text, pos - w + 1, pos)


def test_extract_examples(fib, fib_graph):
    bm = add_bookmark(fib_graph, fib, 11)
    assert extract_with_bookmark(fib_graph, bm, 9, 12) == b"abaa"
    assert extract_with_bookmark(fib_graph, bm, 11, 11) == b"a"
    bm6 = add_bookmark(fib_graph, fib, 6)
    assert extract_with_bookmark(fib_graph, bm6, 4, 9) == b"ababaa"


def test_every_touching_range(fib, fib_graph):
    n = len(fib)
    for pos in range(1, n + 1):
        bm = add_bookmark(fib_graph, fib, pos)
        for f in range(1, pos + 1):
            for l in range(max(f, pos - 1), n + 1):
                assert extract_with_bookmark(fib_graph, bm, f, l) == fib[f - 1 : l]


def test_range_must_touch(fib, fib_graph):
    bm = add_bookmark(fib_graph, fib, 11)
    with pytest.raises(ValueError):
        extract_with_bookmark(fib_graph, bm, 13, 15)


def test_position_out_of_range(fib, fib_graph):
    with pytest.raises(IndexError):
        add_bookmark(fib_graph, fib, 0)


@pytest.mark.parametrize("flat", [0, 2])
def test_random_touching_ranges(flat):
    text = generate_corpus(4000, 8, 0.005, seed=9)
    g = build(text, BuildConfig(flat_top_depth=flat))
    rng = np.random.default_rng(2)
    positions = rng.integers(1, len(text) + 1, size=50)
    table = add_bookmarks(g, text, positions)
    for pos in positions.tolist():
        bm = table.get(pos)
        for _ in range(20):
            length = int(rng.integers(1, 600))
            f = max(1, pos - int(rng.integers(0, length)))
            l = min(len(text), f + length - 1)
            if l < pos - 1:
                continue
            data, visits = extract_with_bookmark_counted(g, bm, f, l)
            assert data == text[f - 1 : l]
            assert visits <= 8 * (l - f + 1) + 16 or flat


def test_table_lookup(fib, fib_graph):
    table = fib_graph.bookmarks
    assert table.positions.tolist() == [1, 2, 3, 6, 11, 19, 21]
    assert 11 in table and 12 not in table
    with pytest.raises(BookmarkError):
        table.get(12)
    assert table.get(11) == add_bookmark(fib_graph, fib, 11)


def test_boundary_positions():
    assert boundary_positions(parse(b"a")).tolist() == []
    assert boundary_positions(parse(b"abab")).tolist() == [1, 2, 4]
