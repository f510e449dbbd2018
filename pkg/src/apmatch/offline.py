"""Offline pipeline: exact small-k phase, covering, sweep, combination.

Per position t the output k~_t is the exact k_t whenever k_t is at most
floor(w^(3/4)); otherwise it is the sweep value over the certified boxes,
always an upper bound on the true k_t.  When the pattern is truncated to a
multiple of w2 for the covering, the lost suffix length is added back to
the approximate values so soundness holds against the full pattern.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .covering import AlignedWindows, BoxRecord, cover_part
from .grid import as_bytes
from .kernels import threshold_table
from .params import CoverParams, normalize_params
from .sweep import box_to_shortcut, sweep_min_cost

__all__ = ["MatchOutput", "approx_match", "exact_cutoff"]


def exact_cutoff(w: int) -> int:
    """Threshold up to which positions are resolved exactly: floor(w^(3/4))."""
    return max(1, int(round(w**0.75, 9)))


@dataclass
class MatchOutput:
    """Per-position estimates: values[t-1] bounds k_t from above; mode is
    "exact" (equals k_t), "approx" (sweep value), or "carried" (repeated
    from the last grid position when the coarse output grid is on)."""

    values: list[int]
    modes: list[str]
    params: CoverParams
    stats: dict = field(default_factory=dict)

    def tsv_lines(self):
        for t, (v, m) in enumerate(zip(self.values, self.modes), 1):
            yield f"{t}\t{v}\t{m}"


def _run_segment(
    text_seg: bytes,
    pattern_t: bytes,
    params: CoverParams,
    seg_offset: int,
    windows: AlignedWindows,
    max_workers: int | None,
    collect_boxes: bool,
):
    """Cover one text segment part by part and sweep its edge set."""
    w_t = params.w_trunc
    n_parts = len(text_seg) // w_t
    jobs = []
    for m in range(n_parts):
        local = m * w_t
        jobs.append((seg_offset + local, local, text_seg[local : local + w_t]))

    def one(job):
        global_off, local_off, content = job
        recs = cover_part(content, pattern_t, params, part_index=global_off,
                          part_offset=local_off, windows=windows)
        edges = []
        counts = {"dense": 0, "extension": 0}
        for rec in recs:
            counts[rec.source] += 1
            if rec.box.i_span.width == rec.box.j_span.width:
                e = box_to_shortcut(rec.box)
                if e is not None:
                    edges.append(e)
        return edges, counts, recs if collect_boxes else None

    if max_workers and max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]

    edges = [e for r in results for e in r[0]]
    counts = {"dense": 0, "extension": 0}
    boxes: list[BoxRecord] = []
    for _, c, recs in results:
        counts["dense"] += c["dense"]
        counts["extension"] += c["extension"]
        if recs is not None:
            boxes.extend(recs)
    values = sweep_min_cost(edges, len(text_seg), len(pattern_t))
    return values, len(edges), counts, boxes


def approx_match(
    text,
    pattern,
    params: CoverParams | None = None,
    *,
    overrides: dict | None = None,
    seed: int = 0,
    paper_grid: bool = False,
    max_workers: int | None = None,
    trace=None,
) -> MatchOutput:
    """Approximate every k_t for the text/pattern pair.

    `paper_grid` reads the sweep only at multiples of w2 and carries the
    value across each block (the coarse-output variant); by default every
    position gets its own sweep readout.  `trace`, if given, receives every
    emitted BoxRecord in deterministic order.
    """
    text, pattern = as_bytes(text), as_bytes(pattern)
    n, w = len(text), len(pattern)
    if params is None:
        ov = {"seed": seed, **(overrides or {})}
        params = normalize_params(w, n, overrides=ov)
    elif params.n != n or params.w != w:
        raise ValueError("params were normalized for different input lengths")

    t0 = time.perf_counter()
    cutoff = exact_cutoff(w)
    exact = threshold_table(text, pattern, cutoff)
    t1 = time.perf_counter()

    w_t = params.w_trunc
    pattern_t = pattern[:w_t]
    corr = w - w_t  # additive slack that restores soundness vs. the full pattern
    windows = AlignedWindows(pattern_t, params)

    segments = [(0, params.seg_prefix)]
    if params.seg_suffix:
        segments.append((n - params.seg_suffix, params.seg_suffix))

    seg_values = []
    total_edges = 0
    counts = {"dense": 0, "extension": 0}
    collect = trace is not None
    for off, length in segments:
        vals, n_edges, c, boxes = _run_segment(
            text[off : off + length], pattern_t, params, off, windows, max_workers, collect
        )
        seg_values.append((off, length, vals))
        total_edges += n_edges
        counts["dense"] += c["dense"]
        counts["extension"] += c["extension"]
        if collect:
            for rec in boxes:
                trace(rec)
    t2 = time.perf_counter()

    def sweep_at(t: int) -> tuple[int, str]:
        # prefix run wins where both cover a position
        for off, length, vals in seg_values:
            if off < t <= off + length:
                local = t - off
                if paper_grid:
                    grid_t = (local // params.w2) * params.w2
                    mode = "approx" if local % params.w2 == 0 else "carried"
                    return vals[grid_t] + corr, mode
                return vals[local] + corr, "approx"
        raise AssertionError(f"position {t} not covered by any segment")

    values, modes = [], []
    for t in range(1, n + 1):
        if exact[t - 1] is not None:
            values.append(exact[t - 1])
            modes.append("exact")
        else:
            v, m = sweep_at(t)
            values.append(v)
            modes.append(m)

    stats = {
        "n": n,
        "w": w,
        "w_trunc": w_t,
        "w1": params.w1,
        "w2": params.w2,
        "d": params.d,
        "theta": params.theta,
        "seed": params.seed,
        "cutoff": cutoff,
        "exact_positions": sum(1 for m in modes if m == "exact"),
        "boxes_dense": counts["dense"],
        "boxes_extension": counts["extension"],
        "edges": total_edges,
        "parts": sum(length // w_t for _, length in segments),
        "time_exact_s": t1 - t0,
        "time_cover_sweep_s": t2 - t1,
    }
    return MatchOutput(values, modes, params, stats)
