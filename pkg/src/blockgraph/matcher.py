"""Approximate pattern matching (edit distance <= k) over a block graph.

Matches are reported per end position: ``dist`` is the smallest edit
distance between the pattern and any substring ending there, and the
witness start is the largest start achieving it.  Matches close to a
phrase boundary are found by verifying short extracted regions; all
others lie inside a copy phrase and are copied from its source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bookmarks import BookmarkError, boundary_positions, extract_pieces
from .graph import BlockGraph


class ConfigurationError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Match:
    end: int
    dist: int
    start: int

    @property
    def witness(self) -> tuple[int, int]:
        return self.start, self.end


@dataclass(frozen=True)
class Region:
    lo: int
    hi: int
    anchors: tuple[int, ...] = ()

    def __len__(self) -> int:
        return self.hi - self.lo + 1


@dataclass
class SearchStats:
    regions: int = 0
    extracted_chars: int = 0
    visits: int = 0
    primary: int = 0
    secondary: int = 0


def merge_regions(boundaries, m: int, k: int, n: int) -> list[Region]:
    """Merge ``[q-(m+k)+1, q+(m+k)]`` around each boundary, clamped to ``[1, n]``."""
    reach = m + k
    out: list[Region] = []
    lo = hi = None
    anchors: list[int] = []
    for q in boundaries:
        a, b = max(1, q - reach + 1), min(n, q + reach)
        if hi is not None and a <= hi + 1:
            hi = max(hi, b)
            anchors.append(int(q))
            continue
        if hi is not None:
            out.append(Region(lo, hi, tuple(anchors)))
        lo, hi, anchors = a, b, [int(q)]
    if hi is not None:
        out.append(Region(lo, hi, tuple(anchors)))
    return out


# -- verification engines ---------------------------------------------------


@njit(cache=True)
def _sellers(text, pat, k):
    """Column DP keeping (cost, start) per cell; ties prefer the larger start."""
    n = text.shape[0]
    m = pat.shape[0]
    cost = np.arange(m + 1).astype(np.int64)
    start = np.zeros(m + 1, dtype=np.int64)
    ends = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.int64)
    starts = np.empty(n, dtype=np.int64)
    found = 0
    for j in range(n):
        diag_c = cost[0]
        diag_s = start[0]
        cost[0] = 0
        start[0] = j + 1  # empty prefix: witness would begin after column j
        for i in range(1, m + 1):
            up_c = cost[i]
            up_s = start[i]
            # substitution / match
            bc = diag_c + (0 if pat[i - 1] == text[j] else 1)
            bs = diag_s
            # text character inserted
            c = up_c + 1
            if c < bc or (c == bc and up_s > bs):
                bc = c
                bs = up_s
            # pattern character deleted
            c = cost[i - 1] + 1
            if c < bc or (c == bc and start[i - 1] > bs):
                bc = c
                bs = start[i - 1]
            diag_c = up_c
            diag_s = up_s
            cost[i] = bc
            start[i] = bs
        if cost[m] <= k:
            s = start[m]
            if s > j:
                s = j  # only the empty witness ties; a one-character witness costs the same
            ends[found] = j + 1
            dists[found] = cost[m]
            starts[found] = s + 1
            found += 1
    return ends[:found], dists[:found], starts[:found]


_NEG = -(1 << 40)


@njit(cache=True)
def _shortest_witness(text, pat, end, dist):
    """Length of the shortest substring ending at ``end`` within ``dist`` of ``pat``.

    Diagonal transitions on the reversed strings, anchored at ``end``.
    """
    m = pat.shape[0]
    avail = end
    width = 2 * dist + 5
    off = dist + 2
    prev = np.full(width, _NEG, dtype=np.int64)
    cur = np.full(width, _NEG, dtype=np.int64)
    for e in range(dist + 1):
        for g in range(-e, e + 1):
            if e == 0:
                row = 0
            else:
                row = prev[g + off] + 1
                if prev[g - 1 + off] > row:
                    row = prev[g - 1 + off]
                if prev[g + 1 + off] + 1 > row:
                    row = prev[g + 1 + off] + 1
            if row > m:
                row = m
            if row + g > avail:
                row = avail - g
            if row < 0 or row + g < 0:
                cur[g + off] = _NEG
                continue
            while row < m and row + g < avail and pat[m - 1 - row] == text[end - 1 - (row + g)]:
                row += 1
            cur[g + off] = row
        for g in range(-e - 1, e + 2):
            prev[g + off] = cur[g + off]
            cur[g + off] = _NEG
    for g in range(-dist, dist + 1):
        if prev[g + off] == m:
            length = m + g
            return length if length > 0 else 1
    return -1


@njit(cache=True)
def _diagonal(text, pat, k):
    """Landau-Vishkin style k-differences scan reporting per-end distances."""
    n = text.shape[0]
    m = pat.shape[0]
    best = np.full(n + 1, k + 1, dtype=np.int64)
    off = k + 2
    size = n + k + 5
    prev = np.full(size, _NEG, dtype=np.int64)
    cur = np.full(size, _NEG, dtype=np.int64)
    for g in range(0, n + 1):
        prev[g + off] = -1
    for e in range(k + 1):
        if e >= 1:
            prev[-e + off] = e - 1
        prev[-e - 1 + off] = _NEG
        for g in range(-e, n + 1):
            row = prev[g + off] + 1
            if prev[g - 1 + off] > row:
                row = prev[g - 1 + off]
            if g + 1 <= n and prev[g + 1 + off] + 1 > row:
                row = prev[g + 1 + off] + 1
            if row > m:
                row = m
            if row + g > n:
                row = n - g
            while row < m and row + g < n and pat[row] == text[row + g]:
                row += 1
            cur[g + off] = row
            if row == m:
                col = g + m
                if col >= 1 and best[col] > e:
                    best[col] = e
        for g in range(-e, n + 1):
            prev[g + off] = cur[g + off]
    count = 0
    for col in range(1, n + 1):
        if best[col] <= k:
            count += 1
    ends = np.empty(count, dtype=np.int64)
    dists = np.empty(count, dtype=np.int64)
    starts = np.empty(count, dtype=np.int64)
    j = 0
    for col in range(1, n + 1):
        if best[col] <= k:
            ends[j] = col
            dists[j] = best[col]
            starts[j] = col - _shortest_witness(text, pat, col, best[col]) + 1
            j += 1
    return ends, dists, starts


def _exact(text: bytes, pattern: bytes):
    ends = []
    p = text.find(pattern)
    while p != -1:
        ends.append(p + len(pattern))
        p = text.find(pattern, p + 1)
    ends = np.asarray(ends, dtype=np.int64)
    return ends, np.zeros_like(ends), ends - len(pattern) + 1


ENGINES = ("diagonal", "dp")


def _verify_arrays(region_text: bytes, pattern: bytes, k: int, engine: str):
    m = len(pattern)
    if m < 1:
        raise ValueError("pattern must be non-empty")
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, m]; got k={k}, m={m}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if not region_text:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    if k == 0:
        return _exact(bytes(region_text), bytes(pattern))
    t = np.frombuffer(bytes(region_text), dtype=np.uint8)
    p = np.frombuffer(bytes(pattern), dtype=np.uint8)
    return (_diagonal if engine == "diagonal" else _sellers)(t, p, k)


def verify_region(region_text: bytes, region_lo: int, pattern: bytes, k: int, engine: str = "diagonal") -> list[Match]:
    """Matches whose witness lies inside ``region_text``, in global coordinates."""
    ends, dists, starts = _verify_arrays(region_text, pattern, k, engine)
    shift = region_lo - 1
    return [Match(int(e) + shift, int(d), int(s) + shift) for e, d, s in zip(ends, dists, starts)]


# -- primary and secondary matches -----------------------------------------


def _dedup(ends, dists, starts):
    """One entry per end: smallest distance, then largest start."""
    if ends.size == 0:
        return ends, dists, starts
    order = np.lexsort((-starts, dists, ends))
    ends, dists, starts = ends[order], dists[order], starts[order]
    keep = np.ones(ends.size, dtype=np.bool_)
    keep[1:] = ends[1:] != ends[:-1]
    return ends[keep], dists[keep], starts[keep]


def _pieces(anchors: np.ndarray, reach: int, n: int):
    """Split the merged regions into per-anchor pieces; returns pieces and region starts."""
    b = np.minimum(n, anchors + reach)
    prev_b = np.concatenate(([0], b[:-1]))
    a = np.maximum(np.maximum(1, anchors - reach + 1), prev_b + 1)
    keep = a <= b
    anchors, a, b, prev_b = anchors[keep], a[keep], b[keep], prev_b[keep]
    new_region = np.ones(a.size, dtype=np.bool_)
    new_region[1:] = a[1:] != prev_b[1:] + 1
    return anchors, a, b, np.flatnonzero(new_region)


@njit(cache=True)
def _exact_scan(text, pat):
    n = text.shape[0]
    m = pat.shape[0]
    ends = np.empty(max(0, n - m + 1), dtype=np.int64)
    found = 0
    for s in range(n - m + 1):
        ok = True
        for i in range(m):
            if text[s + i] != pat[i]:
                ok = False
                break
        if ok:
            ends[found] = s + m
            found += 1
    ends = ends[:found].copy()
    return ends, np.zeros(found, dtype=np.int64), ends - m + 1


@njit(cache=True)
def _verify_many(buf, bounds, los, pat, k, use_dp):
    cap = 64
    ends = np.empty(cap, dtype=np.int64)
    dists = np.empty(cap, dtype=np.int64)
    starts = np.empty(cap, dtype=np.int64)
    count = 0
    for r in range(los.shape[0]):
        text = buf[bounds[r] : bounds[r + 1]]
        if k == 0:
            e, d, st = _exact_scan(text, pat)
        elif use_dp:
            e, d, st = _sellers(text, pat, k)
        else:
            e, d, st = _diagonal(text, pat, k)
        if count + e.shape[0] > cap:
            while count + e.shape[0] > cap:
                cap *= 2
            ends = _grow(ends, cap)
            dists = _grow(dists, cap)
            starts = _grow(starts, cap)
        shift = los[r] - 1
        for t in range(e.shape[0]):
            ends[count] = e[t] + shift
            dists[count] = d[t]
            starts[count] = st[t] + shift
            count += 1
    return ends[:count], dists[:count], starts[:count]


@njit(cache=True)
def _grow(arr, cap):
    out = np.empty(cap, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


def _find_primary_arrays(graph, table, parse, pattern, k, engine, stats):
    m = len(pattern)
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, m]; got k={k}, m={m}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    empty = np.empty(0, dtype=np.int64)
    # the text end anchors a region too: the last phrase has no boundary after it
    anchors = boundary_positions(parse)
    if anchors.size == 0:
        return empty, empty, empty
    if table is None:
        raise ConfigurationError("graph has no boundary bookmarks; rebuild with boundary bookmarks")
    anchors, a, b, region_first = _pieces(anchors, m + k, graph.n)
    try:
        rows = table.rows_of(anchors)
    except BookmarkError as exc:
        raise ConfigurationError(f"{exc}; rebuild with boundary bookmarks") from exc
    lengths = b - a + 1
    buf = np.empty(int(lengths.sum()), dtype=np.uint8)
    got, visits = extract_pieces(
        graph.engine.args, table.windows, table.depths[0], table.left_node, table.left_off,
        table.right_node, table.right_off, rows, anchors, a, b, buf,
    )
    assert got == buf.size
    offsets = np.concatenate(([0], np.cumsum(lengths)))
    bounds = offsets[np.append(region_first, a.size)]
    stats.regions += int(region_first.size)
    stats.extracted_chars += int(buf.size)
    stats.visits += int(visits)
    pat = np.frombuffer(pattern, dtype=np.uint8)
    return _verify_many(buf, bounds, a[region_first], pat, k, engine == "dp")


def find_primary(graph: BlockGraph, bookmarks, parse, pattern: bytes, k: int, engine: str = "diagonal", stats: SearchStats | None = None) -> list[Match]:
    """Matches inside the merged regions around phrase boundaries."""
    stats = stats if stats is not None else SearchStats()
    table = bookmarks if bookmarks is not None else graph.bookmarks
    ends, dists, starts = _find_primary_arrays(graph, table, parse, bytes(pattern), k, engine, stats)
    return [Match(int(e), int(d), int(s)) for e, d, s in zip(ends, dists, starts)]


@njit(cache=True)
def _propagate(pstarts, plens, psrcs, ends, dists, starts, reach):
    cap = 64
    se = np.empty(cap, dtype=np.int64)
    sd = np.empty(cap, dtype=np.int64)
    ss = np.empty(cap, dtype=np.int64)
    cnt = 0
    for ph in range(pstarts.shape[0]):
        i = psrcs[ph]
        if i == 0:
            continue
        j = i + plens[ph] - 1
        lo_end = i + reach - 1
        if lo_end >= j:
            continue
        shift = pstarts[ph] - i
        a = np.searchsorted(ends, lo_end, side="right")
        b = np.searchsorted(ends, j, side="right")
        c = np.searchsorted(se[:cnt], lo_end, side="right")
        d = np.searchsorted(se[:cnt], j, side="right")
        while a < b or c < d:
            if c >= d or (a < b and ends[a] < se[c]):
                e, di, st = ends[a], dists[a], starts[a]
                a += 1
            elif a >= b or se[c] < ends[a]:
                e, di, st = se[c], sd[c], ss[c]
                c += 1
            else:
                e = ends[a]
                if dists[a] < sd[c] or (dists[a] == sd[c] and starts[a] >= ss[c]):
                    di, st = dists[a], starts[a]
                else:
                    di, st = sd[c], ss[c]
                a += 1
                c += 1
            # skip witnesses within reach of either source end: primary search covers those
            if st < i or st >= j - reach + 1:
                continue
            if cnt == cap:
                cap *= 2
                se = _grow(se, cap)
                sd = _grow(sd, cap)
                ss = _grow(ss, cap)
            se[cnt] = e + shift
            sd[cnt] = di
            ss[cnt] = st + shift
            cnt += 1
    return se[:cnt], sd[:cnt], ss[:cnt]


def _propagate_arrays(parse, ends, dists, starts, m: int, k: int):
    se, sd, ss = _propagate(parse.starts, parse.lengths, parse.sources, ends, dists, starts, m + k)
    merged = _dedup(np.concatenate((ends, se)), np.concatenate((dists, sd)), np.concatenate((starts, ss)))
    return merged, int(se.size)


def propagate_secondary(parse, primary: list[Match], m: int, k: int) -> list[Match]:
    """Copy matches from phrase sources into phrases; needs no text access."""
    ends = np.asarray([x.end for x in primary], dtype=np.int64)
    dists = np.asarray([x.dist for x in primary], dtype=np.int64)
    starts = np.asarray([x.start for x in primary], dtype=np.int64)
    ends, dists, starts = _dedup(ends, dists, starts)
    (e, d, s), _ = _propagate_arrays(parse, ends, dists, starts, m, k)
    return [Match(int(a), int(b), int(c)) for a, b, c in zip(e, d, s)]


def search_arrays(graph: BlockGraph, pattern: bytes, k: int, engine: str = "diagonal", stats: SearchStats | None = None):
    """Like :func:`search` but returns ``(ends, dists, starts)`` arrays."""
    pattern = bytes(pattern)
    m = len(pattern)
    if m < 1:
        raise ValueError("pattern must be non-empty")
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, m]; got k={k}, m={m}")
    if graph.parse is None:
        raise ConfigurationError("graph carries no phrase table")
    stats = stats if stats is not None else SearchStats()
    parse = graph.parse
    if parse.z <= 1:
        # a single phrase has no boundary, so the whole (one-character) text is verified
        text = graph.extract(1, graph.n)
        stats.extracted_chars += len(text)
        return _verify_arrays(text, pattern, k, engine)
    ends, dists, starts = _find_primary_arrays(graph, graph.bookmarks, parse, pattern, k, engine, stats)
    stats.primary = int(ends.size)
    merged, stats.secondary = _propagate_arrays(parse, ends, dists, starts, m, k)
    return merged


def search(graph: BlockGraph, pattern: bytes, k: int, engine: str = "diagonal", stats: SearchStats | None = None) -> list[Match]:
    """All end positions whose best substring is within edit distance ``k``.

    Sorted by end; one match per end with the smallest distance.
    """
    ends, dists, starts = search_arrays(graph, pattern, k, engine, stats)
    return [Match(int(e), int(d), int(s)) for e, d, s in zip(ends, dists, starts)]
