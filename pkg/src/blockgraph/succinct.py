"""Plain bitvector with rank/select directories.

Layout: bits packed little-endian into uint64 words; a 512-bit superblock
directory of absolute 1-counts; a 64-bit block directory of counts relative
to the enclosing superblock; sampled select positions every 8192nd bit of
each kind.  Positions are 0-based and ``rank(b, i)`` counts over ``[0, i)``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

SUPERBLOCK_BITS = 512
BLOCK_BITS = 64
SELECT_SAMPLE = 8192
_WORDS_PER_SUPER = SUPERBLOCK_BITS // BLOCK_BITS

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def rank1_arrays(words, supers, blocks, i):
    w = i >> 6
    r = supers[i >> 9] + blocks[w]
    rem = i & 63
    if rem:
        r += popcount64(words[w] & ((np.uint64(1) << np.uint64(rem)) - np.uint64(1)))
    return r


@njit(cache=True, inline="always")
def bit_arrays(words, i):
    return (words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)


class Bitvector:
    __slots__ = ("length", "words", "supers", "blocks", "ones", "_samples1", "_samples0")

    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.bool_).ravel()
        self.length = int(bits.size)
        nwords = self.length // 64 + 1  # spare word keeps rank(length) in range
        raw = np.packbits(bits, bitorder="little")
        buf = np.zeros(nwords * 8, dtype=np.uint8)
        buf[: raw.size] = raw
        self.words = buf.view(np.uint64)
        self._build_directories()

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "Bitvector":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=length, bitorder="little")
        return cls(bits)

    def to_bytes(self) -> bytes:
        return self.words.view(np.uint8)[: (self.length + 7) // 8].tobytes()

    def _build_directories(self):
        counts = np.bitwise_count(self.words).astype(np.int64)
        nsup = (self.words.size + _WORDS_PER_SUPER - 1) // _WORDS_PER_SUPER
        padded = np.zeros(nsup * _WORDS_PER_SUPER, dtype=np.int64)
        padded[: counts.size] = counts
        per_super = padded.reshape(nsup, _WORDS_PER_SUPER)
        sup_totals = per_super.sum(axis=1)
        self.supers = np.concatenate(([0], np.cumsum(sup_totals)[:-1])).astype(np.int64)
        within = np.cumsum(per_super, axis=1) - per_super
        self.blocks = within.ravel()[: self.words.size].astype(np.uint16)
        self.ones = int(counts.sum())
        bits = self.bits()
        self._samples1 = np.flatnonzero(bits)[::SELECT_SAMPLE].astype(np.int64)
        self._samples0 = np.flatnonzero(~bits)[::SELECT_SAMPLE].astype(np.int64)

    def __len__(self) -> int:
        return self.length

    def bits(self) -> np.ndarray:
        return np.unpackbits(self.words.view(np.uint8), count=self.length, bitorder="little").astype(np.bool_)

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def access(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"bit {i} outside [0, {self.length})")
        return int(self.words[i >> 6] >> np.uint64(i & 63)) & 1

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self.length:
            raise IndexError(f"rank position {i} outside [0, {self.length}]")
        w = i >> 6
        r = int(self.supers[i >> 9]) + int(self.blocks[w])
        rem = i & 63
        if rem:
            r += (int(self.words[w]) & ((1 << rem) - 1)).bit_count()
        return r

    def rank(self, b: int, i: int) -> int:
        r1 = self.rank1(i)
        return r1 if b else i - r1

    @property
    def zeros(self) -> int:
        return self.length - self.ones

    def select(self, b: int, j: int) -> int:
        """Position of the ``j``-th ``b`` bit, ``j`` counted from 1."""
        total = self.ones if b else self.zeros
        if not 1 <= j <= total:
            raise LookupError(f"no {b}-bit number {j} (have {total})")
        samples = self._samples1 if b else self._samples0
        start = int(samples[(j - 1) // SELECT_SAMPLE])
        sup = start >> 9
        nsup = self.supers.size

        def ones_before_super(s: int) -> int:
            r = int(self.supers[s])
            return r if b else s * SUPERBLOCK_BITS - r

        while sup + 1 < nsup and ones_before_super(sup + 1) < j:
            sup += 1
        need = j - ones_before_super(sup)
        w = sup * _WORDS_PER_SUPER
        last = min(w + _WORDS_PER_SUPER, self.words.size)
        while w < last:
            word = int(self.words[w])
            if not b:
                word = ~word & 0xFFFFFFFFFFFFFFFF
            c = word.bit_count()
            if c >= need:
                for bit in range(64):
                    if word >> bit & 1:
                        need -= 1
                        if need == 0:
                            return w * 64 + bit
            need -= c
            w += 1
        raise AssertionError("select directory inconsistent")

    def __eq__(self, other) -> bool:
        return isinstance(other, Bitvector) and self.length == other.length and np.array_equal(self.words, other.words)

    def __repr__(self) -> str:
        shown = "".join("1" if x else "0" for x in self.bits()[:64])
        return f"Bitvector({shown}{'...' if self.length > 64 else ''}, len={self.length})"


def concatenate(vectors) -> tuple[Bitvector, np.ndarray]:
    """Join bitvectors end to end; returns the joined vector and start offsets."""
    parts = [v.bits() for v in vectors]
    offsets = np.zeros(len(parts) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([p.size for p in parts])
    joined = np.concatenate(parts) if parts else np.zeros(0, dtype=np.bool_)
    return Bitvector(joined), offsets
