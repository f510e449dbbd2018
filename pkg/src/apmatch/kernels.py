"""Exact edit-distance and text-scan kernels with k-bounded work contracts.

These are the production subroutines: a banded distance check that spends
O((|a|+|b|)*(k+1)) cell evaluations, a full-text scan returning every k_t,
an incremental k-bounded scan usable one symbol at a time, and the cutoff
table that resolves all positions with small k_t exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import as_bytes

__all__ = [
    "ThresholdResult",
    "EndPositionSet",
    "BoundedScan",
    "full_edit_distance",
    "banded_edit_distance",
    "sellers_scan",
    "kbounded_end_positions",
    "threshold_table",
    "batch_edit_distances",
]


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a distance check against threshold k.

    `value` holds the exact distance when it is at most k, otherwise None,
    which certifies that the true distance exceeds k.
    """

    value: int | None
    threshold: int

    @property
    def exceeds(self) -> bool:
        return self.value is None


def full_edit_distance(a, b) -> int:
    """Exact edit distance, rolling-frontier DP."""
    a, b = as_bytes(a), as_bytes(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        ai = a[i - 1]
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ai != b[j - 1]))
        prev = cur
    return prev[len(b)]


def banded_edit_distance(a, b, k: int) -> ThresholdResult:
    """Edit distance restricted to the |i-j| <= k diagonal band.

    Returns the exact distance when it is at most k; any cell on a path of
    cost <= k stays inside the band, so values up to k are trustworthy.
    Values beyond k saturate at k+1 and are reported as "exceeds".
    """
    a, b = as_bytes(a), as_bytes(b)
    if k < 0:
        raise ValueError("threshold k must be nonnegative")
    la, lb = len(a), len(b)
    if abs(la - lb) > k:
        return ThresholdResult(None, k)
    big = k + 1
    lo_prev, hi_prev = 0, min(lb, k)
    prev = list(range(lo_prev, hi_prev + 1))
    for i in range(1, la + 1):
        lo, hi = max(0, i - k), min(lb, i + k)
        ai = a[i - 1]
        cur = []
        for j in range(lo, hi + 1):
            best = big
            if j > lo:
                best = cur[j - 1 - lo] + 1
            if lo_prev <= j <= hi_prev:
                best = min(best, prev[j - lo_prev] + 1)
            if lo_prev <= j - 1 <= hi_prev:
                best = min(best, prev[j - 1 - lo_prev] + (ai != b[j - 1]))
            cur.append(best if best < big else big)
        prev, lo_prev, hi_prev = cur, lo, hi
        if min(prev) > k:
            return ThresholdResult(None, k)
    d = prev[lb - lo_prev]
    return ThresholdResult(d if d <= k else None, k)


def sellers_scan(text, pattern) -> list[int]:
    """Exact k_t for every position t of the text.

    Column-at-a-time DP over the pattern-matching graph with an O(w)
    frontier; the vertical-edge chain inside a column is resolved with a
    running prefix minimum so each column is a few vector operations.
    """
    text, pattern = as_bytes(text), as_bytes(pattern)
    n, w = len(text), len(pattern)
    if w == 0:
        return [0] * n
    pat = np.frombuffer(pattern, dtype=np.uint8)
    idx = np.arange(w + 1, dtype=np.int32)
    col = idx.copy()  # t = 0 boundary: climb only
    out = []
    cand = np.empty(w + 1, dtype=np.int32)
    for i in range(n):
        ci = text[i]
        cand[0] = 0  # free bottom row
        np.add(col[:-1], pat != ci, out=cand[1:])
        np.minimum(cand[1:], col[1:] + 1, out=cand[1:])
        col = np.minimum.accumulate(cand - idx) + idx
        out.append(int(col[w]))
    return out


class BoundedScan:
    """Incremental k-bounded scan: feed text symbols, get exact k_t <= k.

    Keeps only the column prefix that can still hold values <= k (the
    classic last-active-cell cutoff), so a push costs O(active band).
    Cells never computed are provably above the threshold.
    """

    def __init__(self, pattern, k: int):
        if k < 0:
            raise ValueError("threshold k must be nonnegative")
        self.pattern = as_bytes(pattern)
        self.k = k
        w = len(self.pattern)
        self.kcap = min(k, w)
        self.big = self.kcap + 1
        self.lac = min(self.kcap, w)  # D[j][0] = j
        self.col = list(range(min(w, self.lac + 1) + 1))
        if self.col[-1] > self.kcap:
            self.col[-1] = self.big

    def push(self, symbol: int) -> int | None:
        """Advance one text position; return exact k_t if <= k else None."""
        pat, big, kcap = self.pattern, self.big, self.kcap
        w = len(pat)
        prev = self.col
        m_prev = len(prev) - 1
        m = min(w, self.lac + 1)
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            up = prev[j] + 1 if j <= m_prev else big
            diag = (prev[j - 1] + (pat[j - 1] != symbol)) if j - 1 <= m_prev else big
            v = cur[j - 1] + 1
            if up < v:
                v = up
            if diag < v:
                v = diag
            cur[j] = v if v < big else big
        lac = m
        while cur[lac] > kcap:
            lac -= 1
        self.col = cur[: min(w, lac + 1) + 1]
        self.lac = lac
        if m == w and cur[w] <= kcap:
            return cur[w]
        return None


def _bounded_scan_values(text: bytes, pattern: bytes, k: int) -> list[int | None]:
    scan = BoundedScan(pattern, k)
    return [scan.push(c) for c in text]


@dataclass(frozen=True)
class EndPositionSet:
    """Per-position flags: flag(t) iff some substring ending at t is within k."""

    flags: tuple
    k: int

    def flag(self, t: int) -> bool:
        return self.flags[t - 1]

    def positions(self) -> list[int]:
        return [t for t, f in enumerate(self.flags, 1) if f]


def kbounded_end_positions(text, pattern, k: int) -> EndPositionSet:
    """All end positions of substrings within edit distance k of the pattern."""
    text, pattern = as_bytes(text), as_bytes(pattern)
    vals = _bounded_scan_values(text, pattern, k)
    return EndPositionSet(tuple(v is not None for v in vals), k)


def threshold_table(text, pattern, cutoff: int) -> list[int | None]:
    """Exact k_t wherever k_t <= cutoff, None (above-cutoff) elsewhere.

    Runs the k-bounded scan at k = 0 and at each power of two up to the
    first one at or past the cutoff, keeping exact values as they resolve.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    text, pattern = as_bytes(text), as_bytes(pattern)
    ladder = [0]
    k = 1
    while k < cutoff:
        ladder.append(k)
        k *= 2
    ladder.append(k)
    best: list[int | None] = [None] * len(text)
    unresolved = len(text)
    for k in ladder:
        if unresolved == 0:
            break
        vals = _bounded_scan_values(text, pattern, k)
        for t, v in enumerate(vals):
            if best[t] is None and v is not None:
                best[t] = v
                unresolved -= 1
    return [v if v is not None and v <= cutoff else None for v in best]


def batch_edit_distances(windows: np.ndarray, s) -> np.ndarray:
    """Exact edit distances from string s to every row of a uint8 matrix.

    Vectorized across rows; the insert-chain along each DP row is resolved
    with a prefix minimum, mirroring `sellers_scan`.
    """
    s = as_bytes(s)
    m, width = windows.shape
    idx = np.arange(width + 1, dtype=np.int32)
    row = np.tile(idx, (m, 1))
    cand = np.empty_like(row)
    for a in range(1, len(s) + 1):
        ch = s[a - 1]
        cand[:, 0] = a
        np.add(row[:, :-1], windows != ch, out=cand[:, 1:])
        np.minimum(cand[:, 1:], row[:, 1:] + 1, out=cand[:, 1:])
        row = np.minimum.accumulate(cand - idx, axis=1) + idx
    return row[:, width]
