"""Stability-report assembly shared by the CLI and the steering service.

Family specs go through the closed-form tables; undirected graph files go
through the determinant sign rule; directed graphs fall back to a
classification sweep over a grid with refined boundaries.
"""

from __future__ import annotations

import numpy as np

from .graphio import FAMILY_PARAMS, parse_family_spec, resolve_graph_source
from .graphs import Graph, generate_family
from .qep import (
    ASYMPTOTICALLY_STABLE,
    MARGINALLY_STABLE,
    classify_at,
    report_to_dict,
    stability_intervals,
    sweep_threshold,
)
from .spectra import FamilyStability, family_stability

__all__ = [
    "family_report_dict",
    "directed_sweep_report_dict",
    "analyze_source",
    "attach_presets",
]


def _encode(x: float):
    if x == float("inf"):
        return "+inf"
    if x == float("-inf"):
        return "-inf"
    return x


def family_report_dict(fs: FamilyStability) -> dict:
    return {
        "graph": fs.family.spec(),
        "method": "closed-form",
        "stable": [[_encode(lo), _encode(hi)] for lo, hi in fs.stable],
        "unstable": [[_encode(lo), _encode(hi)] for lo, hi in fs.unstable],
        "marginal": [{"s": s, "kind": kind} for s, kind in fs.marginal],
    }


def directed_sweep_report_dict(
    g: Graph, lo: float = -3.0, hi: float = 3.0, step: float = 0.05
) -> dict:
    """Classify a digraph on a grid and refine stable/unstable boundaries.

    Marginal points interior to a region of constant classification are only
    found when the grid hits them exactly; sweeps locate classification
    boundaries, not touching zeros.
    """
    grid = np.arange(lo, hi + step / 2, step)
    verdicts = [classify_at(g, float(s)) for s in grid]

    boundaries: list[float] = []
    marginal: list[dict] = []
    for i, (s, v) in enumerate(zip(grid, verdicts)):
        if v == MARGINALLY_STABLE:
            marginal.append({"s": float(s), "kind": "grid-marginal"})
        if i == 0:
            continue
        prev_s, prev_v = grid[i - 1], verdicts[i - 1]
        flip = (prev_v == ASYMPTOTICALLY_STABLE) != (v == ASYMPTOTICALLY_STABLE)
        if flip and MARGINALLY_STABLE not in (prev_v, v):
            thr = sweep_threshold(g, float(prev_s), float(s), coarse_step=step)
            boundaries.append(thr)
            marginal.append({"s": thr, "kind": "threshold"})

    points = sorted({round(m["s"], 9) for m in marginal})
    edges = [float("-inf")] + points + [float("inf")]
    stable: list[list] = []
    unstable: list[list] = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = (a + 1.0) if np.isinf(b) else (b - 1.0) if np.isinf(a) else 0.5 * (a + b)
        mid = min(max(mid, lo), hi)
        verdict = classify_at(g, float(mid))
        bucket = stable if verdict == ASYMPTOTICALLY_STABLE else unstable
        bucket.append([_encode(a), _encode(b)])

    dedup = []
    seen = set()
    for m in sorted(marginal, key=lambda d: d["s"]):
        key = round(m["s"], 9)
        if key not in seen:
            seen.add(key)
            dedup.append(m)
    return {
        "graph": g.label(),
        "method": "sweep",
        "stable": stable,
        "unstable": unstable,
        "marginal": dedup,
    }


def analyze_source(source) -> dict:
    """Full stability report for a family spec, graph file path, or Graph."""
    if isinstance(source, str) and source.split(":", 1)[0].lower() in FAMILY_PARAMS:
        return family_report_dict(family_stability(parse_family_spec(source)))
    g = resolve_graph_source(source)
    if g.directed:
        return directed_sweep_report_dict(g)
    return report_to_dict(stability_intervals(g))


def attach_presets(report: dict) -> dict:
    """Add a UI-ready preset list derived from the marginal points."""
    presets = []
    for entry in report.get("marginal", []):
        s = float(entry["s"])
        kind = entry.get("kind", "marginal")
        presets.append({"label": f"{kind} (s={s:.4g})", "s": s})
    report = dict(report)
    report["presets"] = presets
    return report
