"""Min-cost sweep over the reduced grid graph with shortcut edges.

The reduced graph keeps the free bottom row, unit H- and V-steps, drops
diagonals, and adds shortcut edges derived from certified boxes.  A single
left-to-right sweep answers, for every t, the cheapest path from (0,0) to
(t, w), using a height-indexed binary tree whose nodes age their stored
costs by elapsed time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .grid import CertifiedBox, GridCoord

__all__ = [
    "ShortcutEdge",
    "SweepTree",
    "box_to_shortcut",
    "sweep_min_cost",
    "reference_min_cost",
]

INF = math.inf


@dataclass(frozen=True)
class ShortcutEdge:
    """A derived edge (min I, min J + l) -> (max I, max J - l) of cost 3l."""

    origin: GridCoord
    dest: GridCoord
    cost: int


def box_to_shortcut(box: CertifiedBox) -> ShortcutEdge | None:
    """Convert a square certified box to its shortcut edge.

    Only boxes whose bound is below half their width yield an edge; weaker
    boxes are dominated by plain horizontal travel and are dropped.
    """
    if box.i_span.width != box.j_span.width:
        raise ValueError("shortcut conversion requires equal-width spans")
    ell = box.bound
    if 2 * ell >= box.i_span.width:
        return None
    return ShortcutEdge(
        GridCoord(box.i_span.lo, box.j_span.lo + ell),
        GridCoord(box.i_span.hi, box.j_span.hi - ell),
        3 * ell,
    )


class SweepTree:
    """Binary tree over heights 0..w answering time-shifted min-cost queries.

    Each node covering the height interval [lo, hi] stores (c, t): the cost
    of the best known path reaching height hi at time t via a shortcut
    landing inside [lo, hi].  Elapsing time adds horizontal steps, so a
    query at time t' >= t reads c + (t' - t).  Nodes materialize lazily on
    first update; untouched nodes answer as (inf, 0).
    """

    def __init__(self, w: int):
        self.w = w
        self.nodes: dict[tuple[int, int], list] = {}

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def update(self, t_new: int, cost: float, j: int) -> None:
        """Record a path of the given cost landing at height j at time t_new."""
        if not 0 <= j <= self.w:
            raise ValueError("landing height out of range")
        lo, hi = 0, self.w
        while True:
            node = self.nodes.get((lo, hi))
            if node is None:
                node = [INF, 0]
                self.nodes[(lo, hi)] = node
            if t_new < node[1]:
                raise ValueError("updates must carry nondecreasing times")
            node[0] = min(node[0] + (t_new - node[1]), cost + hi - j)
            node[1] = t_new
            if lo == hi:
                return
            mid = (lo + hi) // 2
            if j <= mid:
                hi = mid
            else:
                lo = mid + 1

    def query(self, t: int, j: int) -> float:
        """Min cost from (0,0) to (t, j); includes the shortcut-free climb j."""
        if not 0 <= j <= self.w:
            raise ValueError("query height out of range")
        best = float(j)
        lo, hi = 0, self.w
        while True:
            if lo == hi:
                node = self.nodes.get((lo, hi))
                if node is not None and node[0] < INF:
                    best = min(best, node[0] + (t - node[1]))
                return best
            mid = (lo + hi) // 2
            if j <= mid:
                hi = mid
            else:
                node = self.nodes.get((lo, mid))
                if node is not None and node[0] < INF:
                    best = min(best, node[0] + (t - node[1]) + (j - mid))
                lo = mid + 1


def _check_edges(edges: Iterable[ShortcutEdge], n: int, w: int) -> list[ShortcutEdge]:
    out = []
    for e in edges:
        if not (0 <= e.origin.t <= e.dest.t <= n and 0 <= e.origin.y <= w and 0 <= e.dest.y <= w):
            raise ValueError(f"edge {e} outside the {n} x {w} grid")
        if e.cost < 0:
            raise ValueError("edge costs must be nonnegative")
        out.append(e)
    return out


def sweep_min_cost(
    edges: Sequence[ShortcutEdge],
    n: int,
    w: int,
    on_value: Callable[[int, int], None] | None = None,
) -> list[int]:
    """Cheapest (0,0) -> (t, w) cost in the reduced graph, for t = 0..n.

    Edges are processed by increasing origin time; an edge's contribution
    is queued and applied to the tree exactly when its destination time
    arrives.  At each t the output is read before the edges originating at
    t are expanded.  Edges with zero horizontal extent are ignored.
    """
    edges = sorted(_check_edges(edges, n, w), key=lambda e: e.origin.t)
    tree = SweepTree(w)
    pending: dict[int, list[tuple[float, int]]] = {}
    out = []
    ei = 0
    for t in range(n + 1):
        v = int(tree.query(t, w))
        out.append(v)
        if on_value is not None:
            on_value(t, v)
        while ei < len(edges) and edges[ei].origin.t == t:
            e = edges[ei]
            ei += 1
            if e.dest.t == t:
                continue
            c = tree.query(t, e.origin.y)
            pending.setdefault(e.dest.t, []).append((c + e.cost, e.dest.y))
        for cost, j in pending.pop(t + 1, ()):
            tree.update(t + 1, cost, j)
    return out


def reference_min_cost(edges: Sequence[ShortcutEdge], n: int, w: int) -> list[int]:
    """Brute-force DAG relaxation over every vertex; the test oracle for
    `sweep_min_cost`, sharing nothing with the tree machinery."""
    edges = _check_edges(edges, n, w)
    into: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for e in edges:
        if e.dest.t == e.origin.t:
            continue
        into.setdefault((e.dest.t, e.dest.y), []).append((e.origin.t, e.origin.y, e.cost))
    dist = [[INF] * (w + 1) for _ in range(n + 1)]
    for t in range(n + 1):
        row = dist[t]
        for y in range(w + 1):
            if y == 0:
                best = 0.0  # free bottom row
            else:
                best = row[y - 1] + 1
                if t > 0 and dist[t - 1][y] + 1 < best:
                    best = dist[t - 1][y] + 1
            for ot, oy, c in into.get((t, y), ()):
                if dist[ot][oy] + c < best:
                    best = dist[ot][oy] + c
            row[y] = best
    return [int(dist[t][w]) for t in range(n + 1)]
