"""Bookmarks: per-position entry points for extraction in time linear in length.

A bookmark at text position ``pos`` stores, for every stored depth ``d``
with window ``w = block_size(d) / 2``, where the leftmost copies of
``text[pos-w+1..pos]`` (left target) and ``text[pos..pos+w-1]`` (right
target) sit inside internal depth-``d`` blocks.  Extracting a short
stretch next to ``pos`` then starts at the smallest sufficient window
instead of the top of the graph.

The left target is absent when the window would start before position 1;
the prefix block (node 0 of the level, always internal) serves instead.
The right window is clamped to ``text[pos..n]`` near the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from numba import njit

from .graph import BlockGraph, _extract_range, _walk
from .suffix import SuffixIndex

ABSENT = -1


class BookmarkError(LookupError):
    pass


@dataclass(frozen=True)
class Target:
    node: int  # bit position among the stored nodes of its depth
    offset: int


@dataclass(frozen=True)
class BookmarkLevel:
    depth: int
    window: int
    left: Target | None
    right: Target


@dataclass(frozen=True)
class Bookmark:
    pos: int
    levels: tuple[BookmarkLevel, ...]

    def level_for(self, depth: int) -> BookmarkLevel:
        for lv in self.levels:
            if lv.depth == depth:
                return lv
        raise KeyError(depth)


def _locate(graph: BlockGraph, index: SuffixIndex, d: int, ords: np.ndarray, internal: np.ndarray, starts0, lengths):
    """Internal depth-``d`` node and offset holding the leftmost copy of each window."""
    half = graph.stride(d)
    occ = index.leftmost(starts0, lengths)
    nodes = np.empty(occ.size, dtype=np.int64)
    offs = np.empty(occ.size, dtype=np.int64)
    host = np.minimum(occ // half, graph.grid_last(d))
    pos = np.searchsorted(ords, host)
    clipped = np.minimum(pos, ords.size - 1)
    good = (ords[clipped] == host) & internal[clipped]
    nodes[good] = pos[good]
    offs[good] = (occ - host * half)[good]
    for k in np.flatnonzero(~good):
        nodes[k], offs[k] = _chain(graph, index, d, ords, internal, int(occ[k]))
    return nodes, offs


def _chain(graph, index, d, ords, internal, occ):
    # an unusable host block is replaced by its own leftmost copy; occ strictly decreases
    half = graph.stride(d)
    b = graph.block_size(d)
    while True:
        host = min(occ // half, graph.grid_last(d))
        p = int(np.searchsorted(ords, host))
        if p < ords.size and ords[p] == host and internal[p]:
            return p, occ - host * half
        start = host * half
        earlier = int(index.leftmost([start], [min(b, graph.n - start)])[0])
        if earlier >= start:
            raise BookmarkError(f"depth {d}: no internal block holds the copy at {occ + 1}")
        occ = earlier + (occ - start)


class BookmarkTable:
    """Bookmarks for a sorted set of positions, stored column-wise per depth."""

    def __init__(self, graph: BlockGraph, positions, left_node, left_off, right_node, right_off):
        self.depths = list(range(graph.flat_top_depth, graph.trunc_depth + 1))
        self.windows = np.asarray([graph.stride(d) for d in self.depths], dtype=np.int64)
        self.height = graph.height
        self.positions = np.asarray(positions, dtype=np.int64)
        shape = (len(self.depths), self.positions.size)
        # rows are depths, columns are bookmarks
        self.left_node = np.asarray(left_node, dtype=np.int64).reshape(shape)
        self.left_off = np.asarray(left_off, dtype=np.int64).reshape(shape)
        self.right_node = np.asarray(right_node, dtype=np.int64).reshape(shape)
        self.right_off = np.asarray(right_off, dtype=np.int64).reshape(shape)

    @classmethod
    def for_positions(cls, graph: BlockGraph, index: SuffixIndex, positions) -> "BookmarkTable":
        positions = np.unique(np.asarray(positions, dtype=np.int64))
        n = graph.n
        if positions.size and (positions[0] < 1 or positions[-1] > n):
            raise IndexError("bookmark position outside [1, n]")
        cols = ([], [], [], [])
        for d in range(graph.flat_top_depth, graph.trunc_depth + 1):
            w = graph.stride(d)
            ords = graph.node_ordinals(d)
            internal = graph.level(d).B.bits()
            # right window text[pos..pos+w-1], clamped at n
            r_len = np.minimum(w, n - positions + 1)
            r_node, r_off = _locate(graph, index, d, ords, internal, positions - 1, r_len)
            l_node = np.full(positions.size, ABSENT, dtype=np.int64)
            l_off = np.zeros(positions.size, dtype=np.int64)
            has_left = positions - w >= 0
            if has_left.any():
                l_node[has_left], l_off[has_left] = _locate(
                    graph, index, d, ords, internal, positions[has_left] - w, np.full(int(has_left.sum()), w)
                )
            for col, arr in zip(cols, (l_node, l_off, r_node, r_off)):
                col.append(arr)
        return cls(graph, positions, *cols)

    def __len__(self) -> int:
        return int(self.positions.size)

    def __contains__(self, pos: int) -> bool:
        k = int(np.searchsorted(self.positions, pos))
        return k < self.positions.size and self.positions[k] == pos

    def _row(self, pos: int) -> int:
        k = int(np.searchsorted(self.positions, pos))
        if k >= self.positions.size or self.positions[k] != pos:
            raise BookmarkError(f"no bookmark at position {pos}")
        return k

    def get(self, pos: int) -> Bookmark:
        k = self._row(pos)
        levels = []
        for j, d in enumerate(self.depths):
            ln = int(self.left_node[j][k])
            left = None if ln == ABSENT else Target(ln, int(self.left_off[j][k]))
            right = Target(int(self.right_node[j][k]), int(self.right_off[j][k]))
            levels.append(BookmarkLevel(d, int(self.windows[j]), left, right))
        return Bookmark(pos, tuple(levels))

    def __iter__(self):
        for p in self.positions:
            yield self.get(int(p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BookmarkTable):
            return NotImplemented
        return (
            self.depths == other.depths
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.left_node, other.left_node)
            and np.array_equal(self.left_off, other.left_off)
            and np.array_equal(self.right_node, other.right_node)
            and np.array_equal(self.right_off, other.right_off)
        )

    def rows_of(self, positions) -> np.ndarray:
        """Column index of each position; raises if any is not bookmarked."""
        positions = np.asarray(positions, dtype=np.int64)
        rows = np.searchsorted(self.positions, positions)
        clipped = np.minimum(rows, max(0, self.positions.size - 1))
        if self.positions.size == 0 or not np.array_equal(self.positions[clipped], positions):
            missing = positions if self.positions.size == 0 else positions[self.positions[clipped] != positions]
            raise BookmarkError(f"no bookmark at position {int(missing[0])}")
        return rows


def boundary_positions(parse) -> np.ndarray:
    """Phrase boundaries plus the text end: the anchors that search needs."""
    if parse.z <= 1:
        return np.empty(0, dtype=np.int64)
    return np.append(parse.boundaries(), parse.n)


def add_bookmark(graph: BlockGraph, source: SuffixIndex | bytes, i: int) -> Bookmark:
    """Bookmark for the 1-based position ``i``."""
    if not 1 <= i <= graph.n:
        raise IndexError(f"bookmark position {i} outside [1, {graph.n}]")
    index = source if isinstance(source, SuffixIndex) else SuffixIndex(source)
    return BookmarkTable.for_positions(graph, index, [i]).get(i)


def add_bookmarks(graph: BlockGraph, source: SuffixIndex | bytes, positions) -> BookmarkTable:
    index = source if isinstance(source, SuffixIndex) else SuffixIndex(source)
    table = BookmarkTable.for_positions(graph, index, positions)
    if graph.bookmarks is None:
        graph.bookmarks = table
    return table


@njit(cache=True)
def _part(eng, windows, first_depth, nodes, offs, row, pos, left, f, l, need, out, cur):
    # deepest level whose window still covers ``need`` characters
    meta, trunc, flat, flat_last, bw, bs, bb, rw, rs, rb, lw, tb = eng
    j = windows.shape[0] - 1
    while j >= 0 and windows[j] < need:
        j -= 1
    if j < 0:
        got, v = _extract_range(meta, trunc, flat, flat_last, bw, bs, bb, rw, rs, rb, lw, tb, f, l, out[cur:])
        return cur + got, v
    node = nodes[j, row]
    if node == ABSENT:
        # window would start before the text; node 0 is the prefix block
        return _walk(meta, trunc, bw, bs, bb, rw, rs, rb, lw, tb, first_depth + j, 0, f, l, out, cur)
    anchor = pos - windows[j] + 1 if left else pos
    x = offs[j, row] + f - anchor + 1
    return _walk(meta, trunc, bw, bs, bb, rw, rs, rb, lw, tb, first_depth + j, node, x, x + l - f, out, cur)


@njit(cache=True)
def extract_pieces(eng, windows, first_depth, lnode, loff, rnode, roff, rows, anchors, fs, ls, out):
    """Extract ``text[fs[k]..ls[k]]`` next to bookmark row ``rows[k]`` into ``out``.

    Characters up to the bookmark come from left windows, the rest from
    right windows; parts longer than every window start at the top level.
    """
    cur = 0
    visits = 0
    for k in range(rows.shape[0]):
        row = rows[k]
        pos = anchors[k]
        f = fs[k]
        l = ls[k]
        if f <= pos:
            hi = l if l < pos else pos
            cur, v = _part(eng, windows, first_depth, lnode, loff, row, pos, True, f, hi, pos - f + 1, out, cur)
            visits += v
        if l > pos:
            lo = f if f > pos else pos + 1
            cur, v = _part(eng, windows, first_depth, rnode, roff, row, pos, False, lo, l, l - pos + 1, out, cur)
            visits += v
    return cur, visits


def extract_around(graph: BlockGraph, bm: Bookmark, f: int, l: int) -> tuple[bytes, int]:
    """``text[f..l]`` for any range near ``bm.pos``, with the visit count."""
    if not 1 <= f <= l <= graph.n:
        raise IndexError(f"range [{f}, {l}] outside [1, {graph.n}]")
    arrays = [[], [], [], []]
    for lv in bm.levels:
        arrays[0].append(ABSENT if lv.left is None else lv.left.node)
        arrays[1].append(0 if lv.left is None else lv.left.offset)
        arrays[2].append(lv.right.node)
        arrays[3].append(lv.right.offset)
    ln, lo, rn, ro = (np.asarray(a, dtype=np.int64).reshape(-1, 1) for a in arrays)
    windows = np.asarray([lv.window for lv in bm.levels], dtype=np.int64)
    first = bm.levels[0].depth if bm.levels else 0
    one = lambda v: np.array([v], dtype=np.int64)  # noqa: E731
    out = np.empty(l - f + 1, dtype=np.uint8)
    cur, visits = extract_pieces(graph.engine.args, windows, first, ln, lo, rn, ro, one(0), one(bm.pos), one(f), one(l), out)
    assert cur == out.size
    return out.tobytes(), visits


def extract_with_bookmark_counted(graph: BlockGraph, bm: Bookmark, f: int, l: int) -> tuple[bytes, int]:
    if not (f <= bm.pos <= l + 1):
        raise ValueError(f"range [{f}, {l}] does not touch the bookmark at {bm.pos}")
    return extract_around(graph, bm, f, l)


def extract_with_bookmark(graph: BlockGraph, bm: Bookmark, f: int, l: int) -> bytes:
    return extract_with_bookmark_counted(graph, bm, f, l)[0]
