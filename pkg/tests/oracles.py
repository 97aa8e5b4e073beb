"""Slow, obviously-correct reference implementations used by the tests."""

from __future__ import annotations

import numpy as np
from numba import njit


def lz77_greedy(text: bytes) -> list[tuple]:
    """Leftmost-greedy non-overlapping factorization by direct search.

    Returns ``("lit", char)`` or ``("copy", src, length)`` tuples, 1-based.
    """
    out = []
    i, n = 0, len(text)
    while i < n:
        best_len, best_src = 0, -1
        length = 1
        while i + length <= n:
            src = text[:i].find(text[i : i + length])
            if src == -1 or src + length > i:
                # any occurrence ending before i must start no later than i - length
                src = _leftmost_before(text, i, length)
            if src == -1:
                break
            best_len, best_src = length, src
            length += 1
        if best_len == 0:
            out.append(("lit", text[i]))
            i += 1
        else:
            out.append(("copy", best_src + 1, best_len))
            i += best_len
    return out


def _leftmost_before(text: bytes, i: int, length: int) -> int:
    piece = text[i : i + length]
    for s in range(0, i - length + 1):
        if text[s : s + length] == piece:
            return s
    return -1


def first_occurrence(text: bytes, i: int, j: int) -> int:
    return text.find(text[i - 1 : j]) + 1


@njit(cache=True)
def sellers_row(text, pat):
    """Last DP row: entry ``e`` is the best distance of a substring ending at ``e``."""
    n = text.shape[0]
    m = pat.shape[0]
    col = np.arange(m + 1)
    row = np.empty(n + 1, dtype=np.int64)
    row[0] = m
    for j in range(1, n + 1):
        diag = col[0]
        col[0] = 0
        for i in range(1, m + 1):
            old = col[i]
            col[i] = min(diag + (0 if pat[i - 1] == text[j - 1] else 1), old + 1, col[i - 1] + 1)
            diag = old
        row[j] = col[m]
    return row


def sellers_arrays(text: bytes, pattern: bytes, k: int) -> tuple[np.ndarray, np.ndarray]:
    row = sellers_row(np.frombuffer(text, np.uint8), np.frombuffer(pattern, np.uint8))
    ends = np.flatnonzero(row <= k)
    ends = ends[ends >= 1]
    return ends, row[ends]


def sellers(text: bytes, pattern: bytes, k: int) -> dict[int, int]:
    """``{end: dist}`` for every 1-based end whose best substring is within ``k``."""
    ends, dists = sellers_arrays(text, pattern, k)
    return dict(zip(ends.tolist(), dists.tolist()))


def edit_distance(a: bytes, b: bytes) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def matches_brute(text: bytes, pattern: bytes, k: int) -> list[tuple[int, int, int]]:
    """``(end, dist, start)`` with the largest start among optimal witnesses."""
    out = []
    for e in range(1, len(text) + 1):
        best = None
        for f in range(e, 0, -1):
            d = edit_distance(text[f - 1 : e], pattern)
            if best is None or d < best[0]:
                best = (d, f)
        if best[0] <= k:
            out.append((e, best[0], best[1]))
    return out


def rank(bits, b: int, i: int) -> int:
    return sum(1 for x in bits[:i] if x == b)


def select(bits, b: int, j: int) -> int:
    seen = 0
    for pos, x in enumerate(bits):
        if x == b:
            seen += 1
            if seen == j:
                return pos
    raise LookupError(j)
