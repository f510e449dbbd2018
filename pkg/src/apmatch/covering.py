"""Randomized covering: find certified boxes for one text part.

A part of length w is cut into w1-blocks and w2-superblocks.  For each
sampling level eps_j the dense phase probes every block against a sample
of aligned pattern windows; a block judged similar to many windows gets
boxed against all its aligned matches, together with every block close to
it.  The extension phase then samples blocks that stayed sparse, widens
their aligned matches diagonally to superblock scale, and boxes the
extensions whose distance check passes.

Every emitted box is sound by construction: its bound dominates an edit
distance that was actually computed (or a threshold that dominates one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid import CertifiedBox, Span, as_bytes
from .kernels import banded_edit_distance, batch_edit_distances, kbounded_end_positions
from .params import CoverParams, EpsLevel, rng_stream

__all__ = [
    "BoxRecord",
    "AlignedWindows",
    "aligned_starts",
    "dense_probe",
    "find_close_blocks",
    "find_aligned_matches",
    "diagonal_extension",
    "dense_phase",
    "extension_phase",
    "cover_part",
]

DenseSet = dict[int, set]  # level j -> block indices within the part
TraceFn = Callable[["BoxRecord"], None]


@dataclass(frozen=True)
class BoxRecord:
    """An emitted certified box plus its provenance."""

    box: CertifiedBox
    level: int
    source: str  # "dense" or "extension"
    part: int


def aligned_starts(eps: float, w1: int, pattern_len: int) -> list[int]:
    """1-indexed start positions of eps/8-aligned length-w1 pattern windows."""
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    if w1 > pattern_len:
        return []
    step = max(int(eps * w1 / 8), 1)
    return list(range(1, pattern_len - w1 + 2, step))


class AlignedWindows:
    """Aligned pattern windows for every level, with bulk distance evaluation.

    The window matrix is built on the finest level's grid; coarser levels
    are strided views of it, so one vectorized DP per block serves all
    levels of the ladder.
    """

    def __init__(self, pattern, params: CoverParams):
        self.pattern = as_bytes(pattern)
        self.params = params
        self.levels = params.levels()  # finest first
        w1 = params.w1
        if w1 > len(self.pattern):
            raise ValueError("pattern shorter than block length w1")
        self._fine_step = self.levels[0].aligned_step
        self.starts0 = np.arange(0, len(self.pattern) - w1 + 1, self._fine_step, dtype=np.int64)
        pat = np.frombuffer(self.pattern, dtype=np.uint8)
        self.matrix = pat[self.starts0[:, None] + np.arange(w1)[None, :]]

    def stride(self, level: EpsLevel) -> int:
        return level.aligned_step // self._fine_step

    def starts_for(self, level: EpsLevel) -> np.ndarray:
        """0-indexed window starts of the level's alignment grid."""
        return self.starts0[:: self.stride(level)]

    def dists(self, block) -> np.ndarray:
        """Exact edit distance from the block to every finest-grid window."""
        return batch_edit_distances(self.matrix, as_bytes(block))


def dense_probe(
    block,
    pattern,
    level: EpsLevel,
    params: CoverParams,
    rng,
    windows: AlignedWindows | None = None,
    dist_row: np.ndarray | None = None,
) -> bool:
    """Decide whether the block is similar to many aligned pattern windows.

    Draws 8*c0*w*log(n)/(thresh*d) windows with replacement and counts how
    many are within the level threshold; dense means at least c0*log(n)/2
    hits.  When the request exceeds the population, the whole population is
    tested once and the acceptance bar scales down proportionally.
    """
    block = as_bytes(block)
    if windows is None:
        windows = AlignedWindows(pattern, params)
    if dist_row is None:
        dist_row = windows.dists(block)
    sub = dist_row[:: windows.stride(level)]
    pop = int(sub.size)
    if pop == 0:
        return False
    logn = math.log(params.n)
    need = 0.5 * params.c0 * logn
    m_req = max(1, math.ceil(8 * params.c0 * len(windows.pattern) * logn / (level.thresh * params.d)))
    if m_req >= pop:
        hits = int((sub <= level.thresh).sum())
        return hits >= need * pop / m_req
    draws = rng.choices(range(pop), k=m_req)
    hits = sum(1 for ix in draws if sub[ix] <= level.thresh)
    return hits >= need


def find_close_blocks(block, candidates: Sequence[tuple[Span, bytes]], threshold: int) -> list[Span]:
    """Spans of the candidate blocks within edit distance `threshold` of block."""
    block = as_bytes(block)
    out = []
    for span, content in candidates:
        if not banded_edit_distance(block, content, threshold).exceeds:
            out.append(span)
    return out


def find_aligned_matches(pattern, block, level: EpsLevel) -> list[Span]:
    """Aligned pattern windows similar to the block, found by one text scan.

    The scan flags end positions within 3*thresh; a flagged fixed-length
    window is then within 6*thresh (its best match can be longer or shorter
    by at most the distance).  So the result contains every aligned window
    within 3*thresh and nothing beyond 6*thresh.
    """
    pattern, block = as_bytes(pattern), as_bytes(block)
    w1 = len(block)
    flagged = kbounded_end_positions(pattern, block, 3 * level.thresh)
    out = []
    for s in range(1, len(pattern) - w1 + 2, level.aligned_step):
        if flagged.flags[s + w1 - 2]:
            out.append(Span(s - 1, s - 1 + w1))
    return out


def diagonal_extension(pattern, u_len: int, offset_in_u: int, v_start_in_pattern: int) -> Span:
    """Widen a matched window to length u_len, keeping its relative offset.

    The result starts so that the window occupies the same offset in the
    extension as it did in u, clamped to stay inside the pattern.
    """
    pattern = as_bytes(pattern)
    if u_len > len(pattern):
        raise ValueError("extension longer than the pattern")
    if not 1 <= offset_in_u <= u_len:
        raise ValueError("offset must lie within u")
    s = v_start_in_pattern - offset_in_u + 1
    s = max(1, min(s, len(pattern) - u_len + 1))
    return Span(s - 1, s - 1 + u_len)


def _block_span(i: int, w1: int, part_offset: int) -> Span:
    return Span((i - 1) * w1 + part_offset, i * w1 + part_offset)


def dense_phase(
    part,
    pattern,
    params: CoverParams,
    part_index: int = 0,
    part_offset: int = 0,
    windows: AlignedWindows | None = None,
    trace: TraceFn | None = None,
) -> tuple[list[BoxRecord], DenseSet]:
    """Probe every block at every level; box dense blocks against their matches.

    Returns the emitted boxes and, per level, the set of block indices that
    entered the dense set (probed dense, or close to a block that did).
    """
    part, pattern = as_bytes(part), as_bytes(pattern)
    w1 = params.w1
    if len(part) % w1:
        raise ValueError("part length must be a multiple of w1")
    if windows is None:
        windows = AlignedWindows(pattern, params)
    n1 = len(part) // w1
    blocks = [part[(i - 1) * w1 : i * w1] for i in range(1, n1 + 1)]
    levels = params.levels()
    dense: DenseSet = {lvl.j: set() for lvl in levels}
    dist_cache: dict[bytes, np.ndarray] = {}
    records: list[BoxRecord] = []
    emitted = {lvl.j: 0 for lvl in levels}
    for i in range(1, n1 + 1):
        block = blocks[i - 1]
        for lvl in levels:
            if i in dense[lvl.j]:
                continue
            row = dist_cache.get(block)
            if row is None:
                row = windows.dists(block)
                dist_cache[block] = row
            rng = rng_stream(params.seed, part_index, "dense", i, lvl.j)
            if not dense_probe(block, pattern, lvl, params, rng, windows, row):
                continue
            fresh = [i2 for i2 in range(1, n1 + 1) if i2 not in dense[lvl.j]]
            cands = [(_block_span(i2, w1, part_offset), blocks[i2 - 1]) for i2 in fresh]
            x_spans = find_close_blocks(block, cands, 2 * lvl.thresh)
            idx_of = {sp.lo: i2 for (sp, _), i2 in zip(cands, fresh)}
            y_spans = find_aligned_matches(pattern, block, lvl)
            for xs in x_spans:
                for ys in y_spans:
                    rec = BoxRecord(CertifiedBox(xs, ys, 8 * lvl.thresh), lvl.j, "dense", part_index)
                    records.append(rec)
                    if trace is not None:
                        trace(rec)
            emitted[lvl.j] += len(x_spans) * len(y_spans)
            cap = (8 * len(pattern) / lvl.thresh) * (len(part) / w1)
            if emitted[lvl.j] > cap:
                raise RuntimeError(
                    f"dense boxes for level {lvl.j} exceed the hard cap {cap:.0f}"
                )
            dense[lvl.j].update(idx_of[sp.lo] for sp in x_spans)
    return records, dense


def _step9_entries(
    superblock: bytes,
    sb_span: Span,
    pattern: bytes,
    params: CoverParams,
    level: EpsLevel,
    sampled: Iterable[int],
    sub_base: int,
    dist_of: Callable[[int], np.ndarray],
    windows: AlignedWindows,
) -> list[tuple[Span, Span, int]]:
    """Diagonal extensions of each sampled block's aligned matches, with
    their exact distance to the superblock when below 3*eps*w2."""
    w1, w2 = params.w1, params.w2
    stride = windows.stride(level)
    starts = windows.starts_for(level)
    k_ext = 3 * level.thresh * (w2 // w1)
    out = []
    for li in sampled:
        sub = dist_of(li)[::stride]
        for ix in np.flatnonzero(sub <= level.thresh):
            v_start = int(starts[ix]) + 1
            offset_in_u = (li - sub_base - 1) * w1 + 1
            j_span = diagonal_extension(pattern, w2, offset_in_u, v_start)
            res = banded_edit_distance(j_span.slice(pattern), superblock, k_ext)
            if res.exceeds or res.value >= k_ext:
                continue
            out.append((sb_span, j_span, res.value))
    return out


def _fan_out(
    entries: Iterable[tuple[Span, Span, int, int]],
    pattern_len: int,
    params: CoverParams,
) -> dict[tuple[Span, Span], tuple[int, int]]:
    """Expand (I, J, c, level) entries over the power-of-two (a, b) grid,
    keeping only the minimum bound per resulting (I, J) pair."""
    ab = params.ext_ab_values()
    best: dict[tuple[Span, Span], tuple[int, int]] = {}
    for i_span, j_span, c, lvl_j in entries:
        for ai, a in enumerate(ab):
            for b in ab[ai:]:
                if params.ext_box_enlarge:
                    jb = Span(max(0, j_span.lo - a), min(pattern_len, j_span.hi + b))
                else:
                    jb = j_span
                key = (i_span, jb)
                bound = c + a + b
                if key not in best or bound < best[key][0]:
                    best[key] = (bound, lvl_j)
    return best


def extension_phase(
    part,
    pattern,
    params: CoverParams,
    dense_set: DenseSet,
    part_index: int = 0,
    part_offset: int = 0,
    windows: AlignedWindows | None = None,
    trace: TraceFn | None = None,
) -> list[BoxRecord]:
    """Sample sparse blocks per superblock and level; box their extensions."""
    part, pattern = as_bytes(part), as_bytes(pattern)
    w1, w2 = params.w1, params.w2
    if len(part) % w2:
        raise ValueError("part length must be a multiple of w2")
    if windows is None:
        windows = AlignedWindows(pattern, params)
    n2 = len(part) // w2
    per_sb = w2 // w1
    m_req = max(1, math.ceil(params.c1 * math.log(params.n) ** 2 * math.log(len(pattern))))
    dist_cache: dict[int, np.ndarray] = {}

    def dist_of(li: int) -> np.ndarray:
        row = dist_cache.get(li)
        if row is None:
            row = windows.dists(part[(li - 1) * w1 : li * w1])
            dist_cache[li] = row
        return row

    entries = []
    for i2 in range(1, n2 + 1):
        sb = part[(i2 - 1) * w2 : i2 * w2]
        sb_span = Span((i2 - 1) * w2 + part_offset, i2 * w2 + part_offset)
        base = (i2 - 1) * per_sb
        for lvl in params.levels():
            sparse = [base + r for r in range(1, per_sb + 1) if base + r not in dense_set[lvl.j]]
            if not sparse:
                continue
            if m_req >= len(sparse):
                chosen = sparse
            else:
                rng = rng_stream(params.seed, part_index, "ext", i2, lvl.j)
                chosen = sorted(set(rng.choices(sparse, k=m_req)))
            for i_span, j_span, c in _step9_entries(
                sb, sb_span, pattern, params, lvl, chosen, base, dist_of, windows,
            ):
                entries.append((i_span, j_span, c, lvl.j))

    best = _fan_out(entries, len(pattern), params)
    records = []
    for (i_span, j_span), (bound, lvl_j) in sorted(
        best.items(), key=lambda kv: (kv[0][0], kv[0][1])
    ):
        rec = BoxRecord(CertifiedBox(i_span, j_span, bound), lvl_j, "extension", part_index)
        records.append(rec)
        if trace is not None:
            trace(rec)
    return records


def cover_part(
    part,
    pattern,
    params: CoverParams,
    part_index: int = 0,
    part_offset: int = 0,
    windows: AlignedWindows | None = None,
    trace: TraceFn | None = None,
) -> list[BoxRecord]:
    """Run both covering phases on one part; spans come out in text-global
    coordinates (part_offset added).  Deterministic for a fixed seed: all
    randomness flows through streams keyed by (seed, part_index, phase, i, j).
    """
    if windows is None:
        windows = AlignedWindows(pattern, params)
    dense_records, dense = dense_phase(
        part, pattern, params, part_index, part_offset, windows, trace
    )
    ext_records = extension_phase(
        part, pattern, params, dense, part_index, part_offset, windows, trace
    )
    return dense_records + ext_records
