"""Block graph construction.

Every level is generated left to right from the surviving internal nodes of
the level above.  Internal/leaf status and leaf redirections both come from
leftmost-occurrence queries answered by a suffix array, batched per level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import lz77
from .graph import BlockGraph, Level, absent_dest, ceil_log2, child_ordinals, dest_width
from .packed import PackedArray
from .succinct import Bitvector
from .suffix import SuffixIndex

log = logging.getLogger(__name__)


class BuildError(ValueError):
    pass


class ValidationError(AssertionError):
    pass


@dataclass(frozen=True)
class BuildConfig:
    truncate_block_len: int = 4
    flat_top_depth: int = 0

    def __post_init__(self):
        t = self.truncate_block_len
        # children of a block start b/4 apart, so explicit blocks need b/4 >= 1
        if t < 4 or t & (t - 1):
            raise BuildError(f"truncate_block_len must be a power of two >= 4, got {t}")
        if self.flat_top_depth < 0:
            raise BuildError("flat_top_depth must be non-negative")


def truncation_depth(n: int, truncate_block_len: int) -> int:
    height = ceil_log2(n)
    return max(0, height - (truncate_block_len.bit_length() - 1))


def first_occurrence(text: bytes, i: int, j: int, index: SuffixIndex | None = None) -> int:
    """Smallest 1-based ``p`` with ``text[p..p+j-i] == text[i..j]``."""
    if index is None:
        index = SuffixIndex(text)
    return index.first_occurrence(i, j)


def build(
    text: bytes,
    config: BuildConfig | None = None,
    *,
    index: SuffixIndex | None = None,
    bookmark_boundaries: bool = False,
) -> BlockGraph:
    """Build the block graph of ``text`` together with its LZ77 parse."""
    config = config or BuildConfig()
    text = bytes(text)
    n = len(text)
    if n == 0:
        raise BuildError("empty input")
    height = ceil_log2(n)
    trunc = truncation_depth(n, config.truncate_block_len)
    flat = config.flat_top_depth
    if flat and flat >= height:
        raise BuildError(f"flat_top_depth {flat} must be below the height {height}")
    if flat > trunc:
        raise BuildError(f"flat_top_depth {flat} is below the truncation depth {trunc}")
    if index is None:
        index = SuffixIndex(text)

    graph = BlockGraph(
        n=n,
        height=height,
        trunc_depth=trunc,
        flat_top_depth=flat,
        truncate_block_len=config.truncate_block_len,
        levels=[None] * (trunc + 1),
        text_blocks=b"",
    )
    ords = np.arange(graph.grid_last(flat) + 1, dtype=np.int64)
    for d in range(flat, trunc + 1):
        level, internal = _build_level(graph, index, d, ords)
        graph.levels[d] = level
        if d < trunc:
            ords = child_ordinals(ords[internal], graph.grid_last(d + 1))
        else:
            graph.text_blocks = _explicit_blocks(graph, text, ords[internal])
    graph.parse = lz77.parse(text, index)
    if bookmark_boundaries:
        from .bookmarks import BookmarkTable, boundary_positions

        graph.bookmarks = BookmarkTable.for_positions(graph, index, boundary_positions(graph.parse))
    log.info("built graph n=%d height=%d trunc=%d z=%d", n, height, trunc, graph.parse.z)
    return graph


def _build_level(graph: BlockGraph, index: SuffixIndex, d: int, ords: np.ndarray):
    n = graph.n
    b = graph.block_size(d)
    half = graph.stride(d)
    starts = ords * half
    lens = np.minimum(b, n - starts)
    internal = index.leftmost(starts, lens) == starts
    pairs = np.zeros(internal.size, dtype=np.bool_)
    pairs[:-1] = internal[:-1] & internal[1:]

    leaves = ords[~internal]
    q = b >> 2
    kids = 2 * leaves[:, None] + np.arange(3)
    # only the root level can lack a level below it, and the root is never a leaf
    exists = kids <= (graph.grid_last(d + 1) if leaves.size else 0)
    kid_starts = (leaves[:, None] * half + np.arange(3) * q)[exists]
    kid_lens = np.minimum(half, n - kid_starts)
    occ = index.leftmost(kid_starts, kid_lens)
    host = np.minimum(occ // half, graph.grid_last(d))
    offsets = occ - host * half
    pos = np.searchsorted(ords, host)
    ok = (pos < ords.size) & (ords[np.minimum(pos, ords.size - 1)] == host)
    ok &= internal[np.minimum(pos, ords.size - 1)]
    if not ok.all():
        bad = int(kid_starts[~ok][0]) + 1
        raise BuildError(f"depth {d}: redirect target for child at {bad} is not a stored internal node")
    if offsets.size and (offsets.max() >= max(1, half) or (offsets + kid_lens > b).any()):
        raise BuildError(f"depth {d}: leaf offset does not fit inside its destination block")

    dest = np.full(kids.shape, absent_dest(d), dtype=np.int64)
    off = np.zeros(kids.shape, dtype=np.int64)
    dest[exists] = pos
    off[exists] = offsets
    off_width = max(0, graph.height - d - 1)
    level = Level(
        depth=d,
        B=Bitvector(internal),
        R=Bitvector(pairs),
        dest=PackedArray(dest.ravel(), dest_width(d)),
        offset=PackedArray(off.ravel(), off_width),
    )
    return level, internal


def _explicit_blocks(graph: BlockGraph, text: bytes, ords: np.ndarray) -> bytes:
    d = graph.trunc_depth
    b = graph.block_size(d)
    starts = ords * graph.stride(d)
    idx = starts[:, None] + np.arange(b)
    keep = idx < graph.n
    codes = np.frombuffer(text, dtype=np.uint8)
    return codes[idx[keep]].tobytes()


# -- validation -------------------------------------------------------------


@dataclass
class LevelReport:
    depth: int
    block_size: int
    internal: int
    leaves: int
    bits: int


@dataclass
class ValidationReport:
    n: int
    z: int
    levels: list[LevelReport] = field(default_factory=list)

    @property
    def max_internal(self) -> int:
        return max((lv.internal for lv in self.levels), default=0)


def validate(graph: BlockGraph, text: bytes, index: SuffixIndex | None = None) -> ValidationReport:
    """Re-check the structural invariants of ``graph`` against ``text``.

    Raises :class:`ValidationError` naming the offending node; returns
    per-level statistics otherwise.
    """
    text = bytes(text)
    if len(text) != graph.n:
        raise ValidationError(f"extraction mismatch: graph has n={graph.n}, text has {len(text)}")
    if graph.extract(1, graph.n) != text:
        raise ValidationError("extraction mismatch: extract(1, n) differs from the text")
    if index is None:
        index = SuffixIndex(text)
    parse = graph.parse if graph.parse is not None else lz77.parse(text, index)
    z = parse.z
    ends = parse.starts + parse.lengths - 1
    report = ValidationReport(n=graph.n, z=z)
    n = graph.n
    ords = np.arange(graph.grid_last(graph.flat_top_depth) + 1, dtype=np.int64)
    for d in range(graph.flat_top_depth, graph.trunc_depth + 1):
        lv = graph.level(d)
        b = graph.block_size(d)
        half = graph.stride(d)
        if len(lv.B) != ords.size or len(lv.R) != ords.size:
            raise ValidationError(f"depth {d}: expected {ords.size} nodes, B has {len(lv.B)}")
        bits = lv.B.bits()
        rbits = lv.R.bits()
        expect_r = np.zeros_like(bits)
        expect_r[:-1] = bits[:-1] & bits[1:]
        if not np.array_equal(rbits, expect_r):
            i = int(np.flatnonzero(rbits != expect_r)[0])
            raise ValidationError(f"depth {d} node {i}: R bit disagrees with adjacent internal pair")
        starts = ords * half
        lens = np.minimum(b, n - starts)
        occ = index.leftmost(starts, lens)
        truth = occ == starts
        if not np.array_equal(bits, truth):
            i = int(np.flatnonzero(bits != truth)[0])
            raise ValidationError(f"depth {d} node {i} at {int(starts[i]) + 1}: internal mark is wrong")
        if lv.B.ones > 3 * z:
            raise ValidationError(f"depth {d}: {lv.B.ones} internal nodes exceeds 3z = {3 * z}")
        # every first occurrence touches a phrase boundary or starts the text
        first = starts[bits] + 1
        last = first + lens[bits] - 1
        k = np.searchsorted(ends, first)
        touches = (first == 1) | (ends[np.minimum(k, ends.size - 1)] < last)
        if not touches.all():
            i = int(first[~touches][0])
            raise ValidationError(f"depth {d} block at {i}: first occurrence touches no phrase boundary")
        if lv.dest.length != 3 * lv.B.zeros:
            raise ValidationError(f"depth {d}: {lv.dest.length} leaf records for {lv.B.zeros} leaves")
        dest = lv.dest.to_numpy().reshape(-1, 3)
        off = lv.offset.to_numpy().reshape(-1, 3)
        leaves = ords[~bits]
        for row, t in enumerate(leaves):
            for slot in range(3):
                kid = 2 * t + slot
                present = dest[row, slot] != absent_dest(d)
                if present != (kid <= graph.grid_last(d + 1)):
                    raise ValidationError(f"depth {d} leaf {int(t)} slot {slot}: record presence is wrong")
                if not present:
                    continue
                target = int(dest[row, slot])
                if not (0 <= target < ords.size and bits[target]):
                    raise ValidationError(f"depth {d} leaf {int(t)} slot {slot}: target {target} is not internal")
                o = int(off[row, slot])
                kid_start = int(t) * half + slot * (b >> 2)
                kid_len = min(half, n - kid_start)
                src = int(ords[target]) * half + o
                if o >= half or text[src : src + kid_len] != text[kid_start : kid_start + kid_len]:
                    raise ValidationError(f"depth {d} leaf {int(t)} slot {slot}: redirect content differs")
        report.levels.append(LevelReport(d, b, lv.B.ones, lv.B.zeros, lv.bits_used()))
        if d < graph.trunc_depth:
            ords = child_ordinals(ords[bits], graph.grid_last(d + 1))
    return report
