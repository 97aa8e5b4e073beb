"""BG01 container: a bit-exact, checksummed serialization of a block graph.

Layout (little-endian throughout)::

    header   magic "BG01", version u16, flags u16, size u64, n u64,
             height u8, trunc_depth u8, flat_top_depth u8,
             truncate_block_len u16, z u64
    levels   per stored depth: depth u8, node count u64, B bits, R bits,
             record count u64, dest width u8, offset width u8,
             packed dest records, packed offset records
    text     length u64, explicit blocks of the deepest level
    phrases  kind bits (1 = copy), length width u8, packed lengths,
             value width u8, packed source-or-literal values
    marks    count u64, depth count u8, position width u8, packed
             positions, then per depth four (width u8, packed array)
             columns: left node, left offset, right node, right offset
    trailer  CRC-32 of everything before it

Absent bookmark nodes are stored as the all-ones value of their column,
which is always wider than needed for the largest real node position.
``size`` is the total file length, so truncation is told apart from
corruption before the checksum is checked.
"""

from __future__ import annotations

import io
import os
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .bookmarks import ABSENT, BookmarkTable
from .graph import BlockGraph, Level
from .lz77 import Parse
from .packed import PackedArray, bit_width
from .succinct import Bitvector

MAGIC = b"BG01"
VERSION = 1
FLAG_PHRASES = 1
FLAG_BOOKMARKS = 2
_HEADER = struct.Struct("<4sHHQQBBBHQ")


class FormatError(ValueError):
    pass


class BadMagicError(FormatError):
    pass


class VersionMismatchError(FormatError):
    pass


class ChecksumError(FormatError):
    pass


class TruncatedError(FormatError):
    pass


@dataclass
class Encoded:
    data: bytes
    sections: list[tuple[str, int]] = field(default_factory=list)


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()
        self.sections: list[tuple[str, int]] = []
        self._mark = 0

    def put(self, fmt: str, *values):
        self.buf.write(struct.pack("<" + fmt, *values))

    def raw(self, data: bytes):
        self.buf.write(data)

    def packed(self, arr: PackedArray):
        self.put("B", arr.width)
        self.raw(arr.to_bytes())

    def section(self, name: str):
        pos = self.buf.tell()
        self.sections.append((name, pos - self._mark))
        self._mark = pos


class _Reader:
    def __init__(self, data: bytes, pos: int, end: int):
        self.data = data
        self.pos = pos
        self.end = end

    def take(self, count: int) -> bytes:
        if count < 0 or self.pos + count > self.end:
            raise TruncatedError(f"container ends inside a field at byte {self.pos}")
        out = self.data[self.pos : self.pos + count]
        self.pos += count
        return out

    def get(self, fmt: str):
        s = struct.Struct("<" + fmt)
        vals = s.unpack(self.take(s.size))
        return vals if len(vals) > 1 else vals[0]

    def bits(self, length: int) -> Bitvector:
        return Bitvector.from_bytes(self.take((length + 7) // 8), length)

    def packed(self, length: int) -> PackedArray:
        width = self.get("B")
        if width > 57:
            raise FormatError(f"packed width {width} is too large")
        return PackedArray.from_bytes(self.take((length * width + 7) // 8), width, length)


def _column(values: np.ndarray) -> PackedArray:
    values = np.asarray(values, dtype=np.int64)
    top = int(values.max()) if values.size else 0
    width = max(1, bit_width(top + 1))  # all-ones is reserved for ABSENT
    return PackedArray(np.where(values == ABSENT, (1 << width) - 1, values), width)


def encode(graph: BlockGraph, parse: Parse | None = None, bookmarks: BookmarkTable | None = None) -> Encoded:
    parse = parse if parse is not None else graph.parse
    bookmarks = bookmarks if bookmarks is not None else graph.bookmarks
    flags = (FLAG_PHRASES if parse is not None else 0) | (FLAG_BOOKMARKS if bookmarks is not None else 0)
    w = _Writer()
    z = parse.z if parse is not None else 0
    w.raw(_HEADER.pack(MAGIC, VERSION, flags, 0, graph.n, graph.height, graph.trunc_depth,
                       graph.flat_top_depth, graph.truncate_block_len, z))
    w.section("header")
    for d in range(graph.flat_top_depth, graph.trunc_depth + 1):
        lv = graph.level(d)
        w.put("BQ", d, len(lv.B))
        w.raw(lv.B.to_bytes())
        w.raw(lv.R.to_bytes())
        w.put("Q", lv.dest.length)
        w.put("BB", lv.dest.width, lv.offset.width)
        w.raw(lv.dest.to_bytes())
        w.raw(lv.offset.to_bytes())
    w.section("levels")
    w.put("Q", len(graph.text_blocks))
    w.raw(graph.text_blocks)
    w.section("text")
    if parse is not None:
        kinds = Bitvector(parse.sources > 0)
        w.raw(kinds.to_bytes())
        w.packed(PackedArray(parse.lengths))
        w.packed(PackedArray(np.where(parse.sources > 0, parse.sources, parse.chars)))
    w.section("phrases")
    if bookmarks is not None:
        w.put("QB", len(bookmarks), len(bookmarks.depths))
        w.packed(PackedArray(bookmarks.positions))
        for j in range(len(bookmarks.depths)):
            w.packed(_column(bookmarks.left_node[j]))
            w.packed(PackedArray(bookmarks.left_off[j]))
            w.packed(_column(bookmarks.right_node[j]))
            w.packed(PackedArray(bookmarks.right_off[j]))
    w.section("bookmarks")
    body = bytearray(w.buf.getvalue())
    total = len(body) + 4
    struct.pack_into("<Q", body, 8, total)
    body += struct.pack("<I", zlib.crc32(body))
    w.sections.append(("checksum", 4))
    return Encoded(bytes(body), w.sections)


def save(graph: BlockGraph, parse: Parse | None = None, bookmarks: BookmarkTable | None = None, sink=None) -> int:
    """Write the container to ``sink`` (a path or binary file); returns the byte count."""
    enc = encode(graph, parse, bookmarks)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            fh.write(enc.data)
    else:
        sink.write(enc.data)
    return len(enc.data)


def decode(data: bytes) -> tuple[BlockGraph, Parse | None, BookmarkTable | None]:
    data = bytes(data)
    if len(data) < 4:
        raise TruncatedError("container shorter than its magic number")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < 6:
        raise TruncatedError("container ends inside the header")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != VERSION:
        raise VersionMismatchError(f"container version {version}, this library reads {VERSION}")
    if len(data) < _HEADER.size + 4:
        raise TruncatedError("container ends inside the header")
    _, _, flags, size, n, height, trunc, flat, tbl, z = _HEADER.unpack_from(data, 0)
    if len(data) < size:
        raise TruncatedError(f"container holds {len(data)} of {size} declared bytes")
    if len(data) > size:
        raise FormatError(f"{len(data) - size} trailing bytes after the container")
    (stored,) = struct.unpack_from("<I", data, size - 4)
    if zlib.crc32(data[: size - 4]) != stored:
        raise ChecksumError("checksum mismatch")

    r = _Reader(data, _HEADER.size, size - 4)
    if flat > trunc or n < 1:
        raise FormatError("inconsistent header")
    levels: list = [None] * (trunc + 1)
    for expect in range(flat, trunc + 1):
        d, count = r.get("BQ")
        if d != expect:
            raise FormatError(f"level {d} found where {expect} was expected")
        B = r.bits(count)
        R = r.bits(count)
        records = r.get("Q")
        dw, ow = r.get("BB")
        if records != 3 * B.zeros:
            raise FormatError(f"level {d}: {records} records for {B.zeros} leaves")
        dest = PackedArray.from_bytes(r.take((records * dw + 7) // 8), dw, records)
        off = PackedArray.from_bytes(r.take((records * ow + 7) // 8), ow, records)
        levels[d] = Level(d, B, R, dest, off)
    text_blocks = r.take(r.get("Q"))
    graph = BlockGraph(n, height, trunc, flat, tbl, levels, text_blocks)

    parse = None
    if flags & FLAG_PHRASES:
        kinds = r.bits(z).bits()
        lengths = r.packed(z).to_numpy()
        values = r.packed(z).to_numpy()
        parse = Parse(lengths, np.where(kinds, values, 0), np.where(kinds, -1, values))
        if parse.n != n:
            raise FormatError(f"phrase table covers {parse.n} characters, text has {n}")
    bookmarks = None
    if flags & FLAG_BOOKMARKS:
        count, ndepth = r.get("QB")
        if ndepth != trunc - flat + 1:
            raise FormatError("bookmark table depth count disagrees with the levels")
        positions = r.packed(count).to_numpy()
        cols = [[], [], [], []]
        for _ in range(ndepth):
            for c, col in enumerate(cols):
                arr = r.packed(count)
                vals = arr.to_numpy()
                if c % 2 == 0:
                    vals[vals == (1 << arr.width) - 1] = ABSENT
                col.append(vals)
        bookmarks = BookmarkTable(graph, positions, *cols)
    if r.pos != r.end:
        raise FormatError(f"{r.end - r.pos} unread bytes before the checksum")
    graph.parse = parse
    graph.bookmarks = bookmarks
    return graph, parse, bookmarks


def load(source) -> tuple[BlockGraph, Parse | None, BookmarkTable | None]:
    """Read a container from a path, bytes, or binary file."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    return decode(data)
