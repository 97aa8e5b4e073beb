"""Greedy LZ77 parsing without self-reference (LZSS-style phrases).

Each phrase is the longest prefix of the unparsed suffix that occurs entirely
inside the already-parsed prefix, or a single literal byte when the byte has
never been seen.  Among equally long sources the leftmost one is taken.

Text positions exposed by :class:`Phrase` and :class:`Parse` are 1-based.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from numba import njit

from .suffix import SuffixIndex


@dataclass(frozen=True, slots=True)
class Phrase:
    start: int
    length: int
    src: int | None = None
    char: int | None = None

    @property
    def is_literal(self) -> bool:
        return self.src is None

    @property
    def end(self) -> int:
        return self.start + self.length - 1

    @classmethod
    def literal(cls, start: int, char: int) -> "Phrase":
        return cls(start, 1, None, char)

    @classmethod
    def copy(cls, start: int, src: int, length: int) -> "Phrase":
        return cls(start, length, src, None)

    def __repr__(self) -> str:
        if self.is_literal:
            return f"Lit({chr(self.char)!r}@{self.start})"
        return f"Copy({self.src},{self.length}@{self.start})"


class Parse(Sequence):
    """A factorization stored column-wise.

    ``sources`` holds the 1-based source start of copy phrases and 0 for
    literals; ``chars`` holds the literal byte or -1 for copies.
    """

    def __init__(self, lengths, sources, chars):
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.sources = np.asarray(sources, dtype=np.int64)
        self.chars = np.asarray(chars, dtype=np.int64)
        ends = np.cumsum(self.lengths)
        self.starts = ends - self.lengths + 1
        self.n = int(ends[-1]) if ends.size else 0

    @classmethod
    def from_phrases(cls, phrases: Sequence[Phrase]) -> "Parse":
        return cls(
            [p.length for p in phrases],
            [0 if p.is_literal else p.src for p in phrases],
            [p.char if p.is_literal else -1 for p in phrases],
        )

    def __len__(self) -> int:
        return int(self.lengths.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if self.sources[i] == 0:
            return Phrase.literal(int(self.starts[i]), int(self.chars[i]))
        return Phrase.copy(int(self.starts[i]), int(self.sources[i]), int(self.lengths[i]))

    def __iter__(self) -> Iterator[Phrase]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, Parse):
            return (
                np.array_equal(self.lengths, other.lengths)
                and np.array_equal(self.sources, other.sources)
                and np.array_equal(self.chars, other.chars)
            )
        if isinstance(other, Sequence):
            return list(self) == list(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Parse(z={len(self)}, n={self.n})"

    @property
    def z(self) -> int:
        return len(self)

    def boundaries(self) -> np.ndarray:
        """End positions of all phrases except the last."""
        return (self.starts[1:] - 1).copy()


@njit(cache=True)
def _greedy(sa, isa, lcp, codes):
    n = codes.shape[0]
    cap = 1024
    lens = np.empty(cap, dtype=np.int64)
    srcs = np.empty(cap, dtype=np.int64)
    count = 0
    i = 0
    while i < n:
        r = isa[i]
        best_len = 0
        best_src = -1
        # walk towards smaller ranks
        cur = n
        rr = r
        while rr > 0:
            if lcp[rr] < cur:
                cur = lcp[rr]
            if cur == 0 or cur < best_len:
                break
            j = sa[rr - 1]
            if j < i:
                cand = cur if cur < i - j else i - j
                if cand > best_len or (cand == best_len and j < best_src):
                    best_len = cand
                    best_src = j
            rr -= 1
        # walk towards larger ranks
        cur = n
        rr = r + 1
        while rr < n:
            if lcp[rr] < cur:
                cur = lcp[rr]
            if cur == 0 or cur < best_len:
                break
            j = sa[rr]
            if j < i:
                cand = cur if cur < i - j else i - j
                if cand > best_len or (cand == best_len and j < best_src):
                    best_len = cand
                    best_src = j
            rr += 1
        if count == cap:
            cap *= 2
            grown = np.empty(cap, dtype=np.int64)
            grown[:count] = lens[:count]
            lens = grown
            grown = np.empty(cap, dtype=np.int64)
            grown[:count] = srcs[:count]
            srcs = grown
        if best_len == 0:
            lens[count] = 1
            srcs[count] = -1
            i += 1
        else:
            lens[count] = best_len
            srcs[count] = best_src
            i += best_len
        count += 1
    return lens[:count].copy(), srcs[:count].copy()


def parse(text: bytes, index: SuffixIndex | None = None) -> Parse:
    """Leftmost-greedy non-self-referential LZ77 factorization of ``text``."""
    if not text:
        return Parse([], [], [])
    if index is None:
        index = SuffixIndex(text)
    lens, srcs = _greedy(index.sa, index.isa, index.lcp, index.codes)
    starts0 = np.cumsum(lens) - lens
    literal = srcs < 0
    chars = np.where(literal, index.codes[starts0].astype(np.int64), -1)
    return Parse(lens, np.where(literal, 0, srcs + 1), chars)


def boundaries(phrases: Sequence[Phrase]) -> list[int]:
    """Positions where one phrase ends and the next begins (1-based)."""
    if isinstance(phrases, Parse):
        return phrases.boundaries().tolist()
    out, pos = [], 0
    for p in phrases[:-1]:
        pos += p.length
        out.append(pos)
    return out


def decode(phrases: Sequence[Phrase]) -> bytes:
    out = bytearray()
    for p in phrases:
        if p.is_literal:
            out.append(p.char)
        else:
            # sources never overlap the phrase, so a slice copy is safe
            out += out[p.src - 1 : p.src - 1 + p.length]
    return bytes(out)
