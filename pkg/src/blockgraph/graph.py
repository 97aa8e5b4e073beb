"""Queryable block graph.

Level ``d`` holds nodes whose blocks have size ``b = 2**(height - d)`` and
start every ``b/2`` characters.  Only surviving nodes are stored, left to
right, in ``B_d`` (1 = internal, 0 = leaf).  ``R_d`` marks adjacent internal
pairs so the left child of the internal node at bit ``i`` sits at position
``3*rank1(B_d, i) - rank1(R_d, i)`` of level ``d + 1``.  Every leaf owns three
child-slot records (destination position at the same depth, offset into that
destination's block).  The deepest level keeps internal blocks verbatim in
``text_blocks``.

Text positions in the public API are 1-based; node positions and bit
positions are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .packed import PackedArray, packed_get
from .succinct import Bitvector, bit_arrays, rank1_arrays, concatenate


class NoSuchChild(LookupError):
    pass


@dataclass
class Level:
    depth: int
    B: Bitvector
    R: Bitvector
    dest: PackedArray
    offset: PackedArray

    @property
    def internal_count(self) -> int:
        return self.B.ones

    @property
    def leaf_count(self) -> int:
        return self.B.zeros

    def bits_used(self) -> int:
        return 2 * len(self.B) + self.dest.length * self.dest.width + self.offset.length * self.offset.width


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def dest_width(depth: int) -> int:
    # positions at depth d are < 2**(d+1) - 1, so the all-ones value is free
    return depth + 1


def absent_dest(depth: int) -> int:
    return (1 << dest_width(depth)) - 1


# meta columns used by the traversal kernel
_M_B, _M_BOFF, _M_BBASE, _M_ROFF, _M_RBASE, _M_DBASE, _M_DW, _M_OBASE, _M_OW = range(9)


@njit(cache=True)
def _walk(meta, trunc, bw, bs, bb, rw, rs, rb, lw, text_blocks, d0, p0, x0, y0, out, cur):
    stack = np.empty((4 * trunc + 24, 4), dtype=np.int64)
    stack[0, 0] = d0
    stack[0, 1] = p0
    stack[0, 2] = x0
    stack[0, 3] = y0
    top = 1
    visits = 0
    px = np.empty(3, dtype=np.int64)
    py = np.empty(3, dtype=np.int64)
    pc = np.empty(3, dtype=np.int64)
    while top > 0:
        top -= 1
        d = stack[top, 0]
        p = stack[top, 1]
        x = stack[top, 2]
        y = stack[top, 3]
        visits += 1
        b = meta[d, _M_B]
        g = meta[d, _M_BOFF] + p
        internal = bit_arrays(bw, g) != 0
        r1 = rank1_arrays(bw, bs, bb, g) - meta[d, _M_BBASE]
        if internal and d == trunc:
            base = r1 * b - 1
            for k in range(x, y + 1):
                out[cur] = text_blocks[base + k]
                cur += 1
            continue
        q = b >> 2
        e = b >> 3
        if y <= 2 * q:
            npieces = 1
            pc[0] = 0
            px[0] = x
            py[0] = y
        elif x > q and y <= 3 * q:
            npieces = 1
            pc[0] = 1
            px[0] = x
            py[0] = y
        elif x > 2 * q:
            npieces = 1
            pc[0] = 2
            px[0] = x
            py[0] = y
        elif y <= 3 * q:
            npieces = 2
            cut = q + e + 1
            pc[0] = 0
            px[0] = x
            py[0] = cut - 1
            pc[1] = 1
            px[1] = cut
            py[1] = y
        elif x > q:
            npieces = 2
            cut = 2 * q + e + 1
            pc[0] = 1
            px[0] = x
            py[0] = cut - 1
            pc[1] = 2
            px[1] = cut
            py[1] = y
        else:
            npieces = 3
            cut1 = q + e + 1
            cut2 = 2 * q + e + 1
            pc[0] = 0
            px[0] = x
            py[0] = cut1 - 1
            pc[1] = 1
            px[1] = cut1
            py[1] = cut2 - 1
            pc[2] = 2
            px[2] = cut2
            py[2] = y
        if internal:
            rr = rank1_arrays(rw, rs, rb, meta[d, _M_ROFF] + p) - meta[d, _M_RBASE]
            left = 3 * r1 - rr
            for k in range(npieces - 1, -1, -1):
                c = pc[k]
                stack[top, 0] = d + 1
                stack[top, 1] = left + c
                stack[top, 2] = px[k] - c * q
                stack[top, 3] = py[k] - c * q
                top += 1
        else:
            rec0 = 3 * (p - r1)
            for k in range(npieces - 1, -1, -1):
                c = pc[k]
                dest = packed_get(lw, meta[d, _M_DW], meta[d, _M_DBASE], rec0 + c)
                off = packed_get(lw, meta[d, _M_OW], meta[d, _M_OBASE], rec0 + c)
                stack[top, 0] = d
                stack[top, 1] = dest
                stack[top, 2] = px[k] - c * q + off
                stack[top, 3] = py[k] - c * q + off
                top += 1
    return cur, visits


@njit(cache=True)
def _extract_range(meta, trunc, flat, flat_last, bw, bs, bb, rw, rs, rb, lw, text_blocks, f, l, out):
    if flat == 0:
        return _walk(meta, trunc, bw, bs, bb, rw, rs, rb, lw, text_blocks, 0, 0, f, l, out, 0)
    b = meta[flat, _M_B]
    half = b >> 1
    pos = f
    cur = 0
    visits = 0
    while pos <= l:
        t = (pos - 1) // half
        if t > flat_last:
            t = flat_last
        start = t * half + 1
        end = start + b - 1
        if end > l:
            end = l
        cur, v = _walk(meta, trunc, bw, bs, bb, rw, rs, rb, lw, text_blocks, flat, t, pos - start + 1, end - start + 1, out, cur)
        visits += v
        pos = end + 1
    return cur, visits


class _Engine:
    """Flattened arrays handed to the numba traversal kernel."""

    def __init__(self, graph: "BlockGraph"):
        depth_count = graph.trunc_depth + 1
        meta = np.zeros((depth_count, 9), dtype=np.int64)
        present = [graph.levels[d] for d in range(graph.flat_top_depth, depth_count)]
        Ball, boffs = concatenate([lv.B for lv in present])
        Rall, roffs = concatenate([lv.R for lv in present])
        words = []
        word_pos = 0
        for k, lv in enumerate(present):
            d = lv.depth
            meta[d, _M_B] = graph.block_size(d)
            meta[d, _M_BOFF] = boffs[k]
            meta[d, _M_BBASE] = Ball.rank1(int(boffs[k]))
            meta[d, _M_ROFF] = roffs[k]
            meta[d, _M_RBASE] = Rall.rank1(int(roffs[k]))
            meta[d, _M_DBASE] = word_pos * 64
            meta[d, _M_DW] = lv.dest.width
            words.append(lv.dest.words)
            word_pos += lv.dest.words.size
            meta[d, _M_OBASE] = word_pos * 64
            meta[d, _M_OW] = lv.offset.width
            words.append(lv.offset.words)
            word_pos += lv.offset.words.size
        self.meta = meta
        self.B = Ball
        self.R = Rall
        self.leaf_words = np.concatenate(words) if words else np.zeros(2, dtype=np.uint64)
        self.text_blocks = np.frombuffer(graph.text_blocks, dtype=np.uint8) if graph.text_blocks else np.zeros(1, np.uint8)
        self.trunc = graph.trunc_depth
        self.flat = graph.flat_top_depth
        self.flat_last = graph.grid_last(graph.flat_top_depth)

    @property
    def args(self):
        return (
            self.meta, self.trunc, self.flat, self.flat_last, self.B.words, self.B.supers, self.B.blocks,
            self.R.words, self.R.supers, self.R.blocks, self.leaf_words, self.text_blocks,
        )

    def walk(self, d, p, x, y, out, cur=0):
        return _walk(
            self.meta, self.trunc, self.B.words, self.B.supers, self.B.blocks,
            self.R.words, self.R.supers, self.R.blocks, self.leaf_words, self.text_blocks,
            d, p, x, y, out, cur,
        )

    def extract(self, f, l, out):
        return _extract_range(
            self.meta, self.trunc, self.flat, self.flat_last, self.B.words, self.B.supers, self.B.blocks,
            self.R.words, self.R.supers, self.R.blocks, self.leaf_words, self.text_blocks, f, l, out,
        )


@dataclass
class BlockGraph:
    n: int
    height: int
    trunc_depth: int
    flat_top_depth: int
    truncate_block_len: int
    levels: list  # index = depth; None above flat_top_depth
    text_blocks: bytes
    parse: object = None
    bookmarks: object = None
    _engine: _Engine | None = field(default=None, repr=False, compare=False)

    # -- coordinates -------------------------------------------------------
    def block_size(self, d: int) -> int:
        return 1 << (self.height - d)

    def stride(self, d: int) -> int:
        return max(1, self.block_size(d) >> 1)

    def grid_last(self, d: int) -> int:
        """Largest node ordinal kept at depth ``d`` after tail clamping."""
        if d == 0:
            return 0
        b = self.block_size(d)
        half = b >> 1
        return max(0, -(-(self.n - b) // half))

    def node_interval(self, d: int, ordinal: int) -> tuple[int, int]:
        start = ordinal * self.stride(d) + 1
        return start, min(self.n, start + self.block_size(d) - 1)

    def node_ordinals(self, d: int) -> np.ndarray:
        """Grid ordinals of the surviving nodes at depth ``d``, left to right."""
        if not self.flat_top_depth <= d <= self.trunc_depth:
            raise ValueError(f"depth {d} is not stored")
        ords = np.arange(self.grid_last(self.flat_top_depth) + 1, dtype=np.int64)
        for k in range(self.flat_top_depth, d):
            internal = self.levels[k].B.bits()
            ords = child_ordinals(ords[internal], self.grid_last(k + 1))
        return ords

    # -- navigation ----------------------------------------------------------
    def level(self, d: int) -> Level:
        lv = self.levels[d] if 0 <= d < len(self.levels) else None
        if lv is None:
            raise ValueError(f"depth {d} is not stored")
        return lv

    def left_child_index(self, d: int, i: int) -> int:
        lv = self.level(d)
        if d >= self.trunc_depth:
            raise ValueError("nodes at the truncated depth have no children")
        if lv.B.access(i) != 1:
            raise ValueError(f"node {i} at depth {d} is a leaf")
        return 3 * lv.B.rank1(i) - lv.R.rank1(i)

    def resolve_leaf(self, d: int, i: int, slot: int) -> tuple[int, int]:
        lv = self.level(d)
        if lv.B.access(i) != 0:
            raise ValueError(f"node {i} at depth {d} is internal")
        if slot not in (0, 1, 2):
            raise ValueError("slot must be 0, 1 or 2")
        rec = 3 * lv.B.rank(0, i) + slot
        dest = lv.dest[rec]
        if dest == absent_dest(d):
            raise NoSuchChild(f"leaf {i} at depth {d} has no child in slot {slot}")
        return dest, lv.offset[rec]

    # -- queries ---------------------------------------------------------------
    @property
    def engine(self) -> _Engine:
        if self._engine is None:
            self._engine = _Engine(self)
        return self._engine

    def extract_counted(self, f: int, l: int) -> tuple[bytes, int]:
        """``text[f..l]`` together with the number of node visits spent."""
        if not 1 <= f <= l <= self.n:
            raise IndexError(f"range [{f}, {l}] outside [1, {self.n}]")
        out = np.empty(l - f + 1, dtype=np.uint8)
        cur, visits = self.engine.extract(f, l, out)
        assert cur == out.size
        return out.tobytes(), visits

    def extract(self, f: int, l: int) -> bytes:
        return self.extract_counted(f, l)[0]

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} outside [1, {self.n}]")
        return self.extract(i, i)[0]

    def extract_node(self, d: int, p: int, x: int, y: int) -> tuple[bytes, int]:
        """Characters ``x..y`` (1-based) of the block of node ``p`` at depth ``d``."""
        out = np.empty(y - x + 1, dtype=np.uint8)
        cur, visits = self.engine.walk(d, p, x, y, out)
        assert cur == out.size
        return out.tobytes(), visits

    # -- statistics --------------------------------------------------------------
    def level_stats(self) -> list[dict]:
        rows = []
        for d in range(self.flat_top_depth, self.trunc_depth + 1):
            lv = self.levels[d]
            rows.append(
                {
                    "depth": d,
                    "block_size": self.block_size(d),
                    "internal": lv.internal_count,
                    "leaves": lv.leaf_count,
                    "bits": lv.bits_used(),
                }
            )
        return rows

    def size_bits(self) -> int:
        return sum(r["bits"] for r in self.level_stats()) + 8 * len(self.text_blocks)


def child_ordinals(internal_ords: np.ndarray, last_next: int) -> np.ndarray:
    kids = (2 * internal_ords[:, None] + np.arange(3)).ravel()
    kids = kids[kids <= last_next]
    return np.unique(kids)


def left_child_index(graph: BlockGraph, d: int, i: int) -> int:
    return graph.left_child_index(d, i)


def resolve_leaf(graph: BlockGraph, d: int, i: int, slot: int) -> tuple[int, int]:
    return graph.resolve_leaf(d, i, slot)


def access(graph: BlockGraph, i: int) -> int:
    return graph.access(i)


def extract(graph: BlockGraph, f: int, l: int) -> bytes:
    return graph.extract(f, l)
