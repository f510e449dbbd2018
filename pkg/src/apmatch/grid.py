"""Grid-graph semantics for pattern matching under edit distance.

The text runs along the horizontal axis, the pattern along the vertical
axis.  H-steps and V-steps cost 1; a D-step costs 0 when the two symbols
match and 1 otherwise.  The pattern-matching variant additionally prices
the bottom-row horizontal edges (y = 0) at 0, so a match may begin
anywhere in the text.

Everything in this module is a reference implementation: plain quadratic
DPs and explicit condition checks, deliberately independent of the
production kernels so the rest of the package can be tested against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Span",
    "GridCoord",
    "CertifiedBox",
    "MonotonePath",
    "ApproxCheck",
    "as_bytes",
    "pm_cost_oracle",
    "edit_cost_oracle",
    "path_cost",
    "verify_box",
    "verify_approximation",
]


def as_bytes(s) -> bytes:
    """Coerce str/bytes/bytearray input to bytes (strings are UTF-8)."""
    if isinstance(s, bytes):
        return s
    if isinstance(s, str):
        return s.encode("utf-8")
    return bytes(s)


@dataclass(frozen=True, order=True)
class Span:
    """Integer interval {lo..hi} on one axis, naming a substring.

    The denoted substring occupies 1-indexed positions lo+1 .. hi, so the
    width hi - lo equals its length.  A zero-width span names an empty
    substring sitting between positions.
    """

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid span [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo

    @property
    def start(self) -> int:
        """1-indexed position of the first denoted symbol."""
        return self.lo + 1

    def slice(self, s: bytes) -> bytes:
        if self.hi > len(s):
            raise ValueError(f"span [{self.lo}, {self.hi}] outside string of length {len(s)}")
        return s[self.lo : self.hi]

    def shift(self, delta: int) -> "Span":
        return Span(self.lo + delta, self.hi + delta)


@dataclass(frozen=True, order=True)
class GridCoord:
    """A vertex (t, y) of the grid: t on the text axis, y on the pattern axis."""

    t: int
    y: int


@dataclass(frozen=True)
class CertifiedBox:
    """A sub-grid I x J together with an upper bound on its crossing cost.

    Soundness means the cheapest corner-to-corner path of the edit-distance
    subgraph on i_span x j_span costs at most `bound`; `verify_box` checks
    this against the oracle.
    """

    i_span: Span
    j_span: Span
    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("box bound must be nonnegative")


class MonotonePath:
    """A grid path made of unit H/V/D steps, nondecreasing on both axes."""

    def __init__(self, coords: Iterable):
        pts = []
        for c in coords:
            if isinstance(c, GridCoord):
                pts.append((c.t, c.y))
            else:
                t, y = c
                pts.append((int(t), int(y)))
        if not pts:
            raise ValueError("path must contain at least one vertex")
        for (t0, y0), (t1, y1) in zip(pts, pts[1:]):
            dt, dy = t1 - t0, y1 - y0
            if (dt, dy) not in ((1, 0), (0, 1), (1, 1)):
                raise ValueError(f"({t0},{y0}) -> ({t1},{y1}) is not a unit H/V/D step")
        self.coords: tuple = tuple(pts)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    @property
    def t_min(self) -> int:
        return self.coords[0][0]

    @property
    def t_max(self) -> int:
        return self.coords[-1][0]

    def entry_height(self, t: int) -> int:
        """Height of the last path vertex with text coordinate t."""
        ys = [y for (tt, y) in self.coords if tt == t]
        if not ys:
            raise ValueError(f"t={t} not on the path's horizontal projection")
        return ys[-1]

    def exit_height(self, t: int) -> int:
        """Height of the first path vertex with text coordinate t."""
        ys = [y for (tt, y) in self.coords if tt == t]
        if not ys:
            raise ValueError(f"t={t} not on the path's horizontal projection")
        return ys[0]


def _edit_distance_dp(a: bytes, b: bytes) -> int:
    """Textbook edit-distance DP with a rolling frontier."""
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


def edit_cost_oracle(text, pattern, i_span: Span, j_span: Span) -> int:
    """Exact edit distance between the two substrings named by the spans."""
    text, pattern = as_bytes(text), as_bytes(pattern)
    return _edit_distance_dp(i_span.slice(text), j_span.slice(pattern))


def pm_cost_oracle(text, pattern, t: int) -> int:
    """Exact k_t: cheapest edit distance from the pattern to any substring
    of the text ending at position t (1-indexed).

    Full DP over the pattern-matching graph on {0..t} x {0..w}; the free
    bottom row lets the match start anywhere at or before t.
    """
    text, pattern = as_bytes(text), as_bytes(pattern)
    if not 1 <= t <= len(text):
        raise ValueError(f"position t={t} out of range 1..{len(text)}")
    w = len(pattern)
    col = list(range(w + 1))
    for i in range(1, t + 1):
        ci = text[i - 1]
        new = [0] * (w + 1)
        for j in range(1, w + 1):
            new[j] = min(col[j] + 1, new[j - 1] + 1, col[j - 1] + (ci != pattern[j - 1]))
        col = new
    return col[w]


def path_cost(text, pattern, path: MonotonePath) -> int:
    """Cost of a path in the edit-distance graph (H/V cost 1, D cost by match)."""
    text, pattern = as_bytes(text), as_bytes(pattern)
    total = 0
    for (t0, y0), (t1, y1) in zip(path.coords, path.coords[1:]):
        if t1 > t0 and y1 > y0:
            total += text[t1 - 1] != pattern[y1 - 1]
        else:
            total += 1
    return total


def verify_box(text, pattern, box: CertifiedBox) -> bool:
    """True iff the box's cost bound really dominates the oracle cost."""
    return edit_cost_oracle(text, pattern, box.i_span, box.j_span) <= box.bound


@dataclass(frozen=True)
class ApproxCheck:
    """Outcome of `verify_approximation`; falsy when any condition failed."""

    ok: bool
    failures: tuple

    def __bool__(self) -> bool:
        return self.ok


def verify_approximation(
    text,
    pattern,
    boxes: Sequence[CertifiedBox],
    path: MonotonePath,
    k: float,
    zeta: float,
) -> ApproxCheck:
    """Check that a box sequence approximates the path within budget k, zeta.

    Three conditions: (1) the text spans chain end-to-end across the path's
    horizontal projection, (2) each box covers the path (the subpath's first
    and last vertices sit within bound_i of the box's lower-left and
    upper-right corners vertically; a box whose bound reaches its width
    covers automatically), and (3) the bounds sum to at most
    k * cost(path) + zeta.
    """
    failures = []
    if not boxes:
        failures.append("decomposition: empty box sequence")
        return ApproxCheck(False, tuple(failures))

    if boxes[0].i_span.lo != path.t_min or boxes[-1].i_span.hi != path.t_max:
        failures.append("decomposition: spans do not cover the projection")
    for a, b in zip(boxes, boxes[1:]):
        if b.i_span.lo != a.i_span.hi:
            failures.append(
                f"decomposition: gap between [{a.i_span.lo},{a.i_span.hi}] "
                f"and [{b.i_span.lo},{b.i_span.hi}]"
            )
            break

    if not failures:
        for idx, box in enumerate(boxes):
            if box.bound >= box.i_span.width:
                continue  # covering fraction at or past 1
            y_in = path.entry_height(box.i_span.lo)
            y_out = path.exit_height(box.i_span.hi)
            if abs(y_in - box.j_span.lo) > box.bound or abs(y_out - box.j_span.hi) > box.bound:
                failures.append(f"coverage: box {idx} misses the path")

    total = sum(b.bound for b in boxes)
    budget = k * path_cost(text, pattern, path) + zeta
    if total > budget:
        failures.append(f"cost: sum of bounds {total} exceeds budget {budget}")

    return ApproxCheck(not failures, tuple(failures))
