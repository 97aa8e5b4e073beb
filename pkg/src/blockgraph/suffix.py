"""Suffix array, LCP array and leftmost-occurrence queries over a byte text.

The suffix array is built with SA-IS (induced sorting); the reduced problem
is solved by recursing from Python so each numba kernel stays non-recursive.
All positions in this module are 0-based.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _classify(s, n):
    ls = np.zeros(n, dtype=np.bool_)
    for i in range(n - 2, -1, -1):
        if s[i] == s[i + 1]:
            ls[i] = ls[i + 1]
        else:
            ls[i] = s[i] < s[i + 1]
    return ls


@njit(cache=True)
def _bucket_bounds(s, ls, upper):
    n = s.shape[0]
    sum_l = np.zeros(upper + 2, dtype=np.int64)
    sum_s = np.zeros(upper + 2, dtype=np.int64)
    for i in range(n):
        if not ls[i]:
            sum_s[s[i]] += 1
        else:
            sum_l[s[i] + 1] += 1
    for i in range(upper + 1):
        sum_s[i] += sum_l[i]
        if i < upper:
            sum_l[i + 1] += sum_s[i]
    return sum_l, sum_s


@njit(cache=True)
def _induce(s, ls, lms, sum_l, sum_s, sa):
    n = s.shape[0]
    sa[:] = -1
    buf = sum_s.copy()
    for idx in range(lms.shape[0]):
        d = lms[idx]
        if d == n:
            continue
        c = s[d]
        sa[buf[c]] = d
        buf[c] += 1
    buf[:] = sum_l
    c = s[n - 1]
    sa[buf[c]] = n - 1
    buf[c] += 1
    for i in range(n):
        v = sa[i]
        if v >= 1 and not ls[v - 1]:
            c = s[v - 1]
            sa[buf[c]] = v - 1
            buf[c] += 1
    buf[:] = sum_l
    for i in range(n - 1, -1, -1):
        v = sa[i]
        if v >= 1 and ls[v - 1]:
            c = s[v - 1] + 1
            buf[c] -= 1
            sa[buf[c]] = v - 1


@njit(cache=True)
def _lms_positions(ls, n):
    lms_map = np.full(n + 1, -1, dtype=np.int32)
    count = 0
    for i in range(1, n):
        if not ls[i - 1] and ls[i]:
            lms_map[i] = count
            count += 1
    lms = np.empty(count, dtype=np.int32)
    count = 0
    for i in range(1, n):
        if not ls[i - 1] and ls[i]:
            lms[count] = i
            count += 1
    return lms_map, lms


@njit(cache=True)
def _reduce(s, sa, lms_map, lms):
    n = s.shape[0]
    m = lms.shape[0]
    sorted_lms = np.empty(m, dtype=np.int32)
    j = 0
    for i in range(n):
        v = sa[i]
        if lms_map[v] != -1:
            sorted_lms[j] = v
            j += 1
    rec = np.empty(m, dtype=np.int32)
    upper = 0
    rec[lms_map[sorted_lms[0]]] = 0
    for i in range(1, m):
        left = sorted_lms[i - 1]
        right = sorted_lms[i]
        end_l = lms[lms_map[left] + 1] if lms_map[left] + 1 < m else n
        end_r = lms[lms_map[right] + 1] if lms_map[right] + 1 < m else n
        same = True
        if end_l - left != end_r - right:
            same = False
        else:
            while left < end_l:
                if s[left] != s[right]:
                    break
                left += 1
                right += 1
            if left == n or s[left] != s[right]:
                same = False
        if not same:
            upper += 1
        rec[lms_map[sorted_lms[i]]] = upper
    return rec, upper


def _sa_is(s: np.ndarray, upper: int) -> np.ndarray:
    n = s.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int32)
    if n == 1:
        return np.zeros(1, dtype=np.int32)
    if n == 2:
        return np.array([0, 1] if s[0] < s[1] else [1, 0], dtype=np.int32)
    ls = _classify(s, n)
    sum_l, sum_s = _bucket_bounds(s, ls, upper)
    lms_map, lms = _lms_positions(ls, n)
    sa = np.empty(n, dtype=np.int32)
    _induce(s, ls, lms, sum_l, sum_s, sa)
    if lms.shape[0]:
        rec, rec_upper = _reduce(s, sa, lms_map, lms)
        del lms_map
        rec_sa = _sa_is(rec, int(rec_upper))
        del rec
        _induce(s, ls, lms[rec_sa], sum_l, sum_s, sa)
    return sa


def suffix_array(text: bytes | np.ndarray) -> np.ndarray:
    """Suffix array of ``text`` as an int32 array (0-based suffix starts)."""
    s = np.frombuffer(text, dtype=np.uint8) if isinstance(text, (bytes, bytearray, memoryview)) else text
    if s.shape[0] >= 2**31 - 1:
        raise ValueError("text too long for 32-bit suffix array")
    return _sa_is(s, 255)


@njit(cache=True)
def _inverse(sa):
    isa = np.empty_like(sa)
    for r in range(sa.shape[0]):
        isa[sa[r]] = r
    return isa


@njit(cache=True)
def _kasai(s, sa, isa):
    # lcp[r] = lcp(suffix sa[r-1], suffix sa[r]); lcp[0] = 0
    n = s.shape[0]
    lcp = np.zeros(n, dtype=np.int32)
    h = 0
    for i in range(n):
        r = isa[i]
        if r == 0:
            h = 0
            continue
        j = sa[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return lcp


@njit(cache=True)
def _leftmost_runs(sa, lcp, ranks, lengths, out):
    # ranks sorted ascending, all queries share one length
    n = sa.shape[0]
    run_lo = -1
    run_hi = -1
    run_min = 0
    for q in range(ranks.shape[0]):
        r = ranks[q]
        length = lengths[q]
        if r > run_hi or q == 0 or length != lengths[q - 1]:
            lo = r
            while lo > 0 and lcp[lo] >= length:
                lo -= 1
            hi = r
            while hi + 1 < n and lcp[hi + 1] >= length:
                hi += 1
            best = sa[lo]
            for k in range(lo + 1, hi + 1):
                if sa[k] < best:
                    best = sa[k]
            run_lo = lo
            run_hi = hi
            run_min = best
        out[q] = run_min


class SuffixIndex:
    """Suffix array, inverse suffix array and LCP array of a byte text.

    Answers batched leftmost-occurrence queries: for a window
    ``text[p:p+length]`` the smallest position where the same bytes occur.
    """

    def __init__(self, text: bytes):
        self.text = bytes(text)
        self.n = len(self.text)
        self.codes = np.frombuffer(self.text, dtype=np.uint8)
        self.sa = suffix_array(self.codes)
        self.isa = _inverse(self.sa) if self.n else np.empty(0, dtype=np.int32)
        self.lcp = _kasai(self.codes, self.sa, self.isa) if self.n else np.empty(0, dtype=np.int32)

    def leftmost(self, positions, lengths) -> np.ndarray:
        """Leftmost occurrence of each window ``text[p:p+len]`` (0-based)."""
        positions = np.asarray(positions, dtype=np.int64)
        lengths = np.broadcast_to(np.asarray(lengths, dtype=np.int64), positions.shape)
        if positions.size == 0:
            return np.empty(0, dtype=np.int64)
        if np.any(lengths < 1) or np.any(positions < 0) or np.any(positions + lengths > self.n):
            raise ValueError("window outside text")
        ranks = self.isa[positions].astype(np.int64)
        order = np.lexsort((ranks, lengths))
        out = np.empty(positions.size, dtype=np.int64)
        sorted_out = np.empty(positions.size, dtype=np.int64)
        _leftmost_runs(self.sa, self.lcp, ranks[order], np.ascontiguousarray(lengths[order]), sorted_out)
        out[order] = sorted_out
        return out

    def first_occurrence(self, i: int, j: int) -> int:
        """1-based leftmost start of ``text[i..j]`` (1-based, inclusive)."""
        if not 1 <= i <= j <= self.n:
            raise ValueError(f"bad interval [{i}, {j}] for n={self.n}")
        return int(self.leftmost([i - 1], [j - i + 1])[0]) + 1
