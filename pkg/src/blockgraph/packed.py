"""Fixed-width bit-packed unsigned integer arrays."""

from __future__ import annotations

import numpy as np
from numba import njit


def bit_width(max_value: int) -> int:
    """Bits needed to store every integer in ``[0, max_value]``."""
    return int(max_value).bit_length() if max_value > 0 else 0


@njit(cache=True, inline="always")
def packed_get(words, width, bit_base, index):
    if width == 0:
        return np.int64(0)
    pos = bit_base + index * width
    w = pos >> 6
    shift = np.uint64(pos & 63)
    v = words[w] >> shift
    if (pos & 63) + width > 64:
        v |= words[w + 1] << (np.uint64(64) - shift)
    return np.int64(v & ((np.uint64(1) << np.uint64(width)) - np.uint64(1)))


class PackedArray:
    """Immutable array of ``length`` integers stored in ``width`` bits each."""

    __slots__ = ("width", "length", "words")

    def __init__(self, values, width: int | None = None):
        values = np.asarray(values, dtype=np.int64).ravel()
        if values.size and values.min() < 0:
            raise ValueError("packed values must be non-negative")
        top = int(values.max()) if values.size else 0
        if width is None:
            width = bit_width(top)
        elif bit_width(top) > width:
            raise ValueError(f"value {top} does not fit in {width} bits")
        if width > 57:
            raise ValueError("width above 57 bits is not supported")
        self.width = width
        self.length = int(values.size)
        nbits = self.length * width
        nwords = nbits // 64 + 2
        if width == 0 or self.length == 0:
            self.words = np.zeros(nwords, dtype=np.uint64)
            return
        shifts = np.arange(width, dtype=np.uint64)
        bits = ((values.astype(np.uint64)[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
        raw = np.packbits(bits, bitorder="little")
        buf = np.zeros(nwords * 8, dtype=np.uint8)
        buf[: raw.size] = raw
        self.words = buf.view(np.uint64)

    @classmethod
    def from_bytes(cls, data: bytes, width: int, length: int) -> "PackedArray":
        obj = cls.__new__(cls)
        obj.width = width
        obj.length = length
        nwords = length * width // 64 + 2
        buf = np.zeros(nwords * 8, dtype=np.uint8)
        raw = np.frombuffer(data, dtype=np.uint8)
        buf[: raw.size] = raw
        obj.words = buf.view(np.uint64)
        return obj

    def nbytes(self) -> int:
        return (self.length * self.width + 7) // 8

    def to_bytes(self) -> bytes:
        return self.words.view(np.uint8)[: self.nbytes()].tobytes()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return int(packed_get(self.words, self.width, 0, i))

    def to_numpy(self) -> np.ndarray:
        if self.width == 0 or self.length == 0:
            return np.zeros(self.length, dtype=np.int64)
        bits = np.unpackbits(self.words.view(np.uint8), count=self.length * self.width, bitorder="little")
        weights = (np.uint64(1) << np.arange(self.width, dtype=np.uint64))
        return (bits.reshape(self.length, self.width).astype(np.uint64) * weights).sum(axis=1).astype(np.int64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PackedArray)
            and self.width == other.width
            and self.length == other.length
            and self.to_bytes() == other.to_bytes()
        )
