"""Command-line front door: analyze, spectrum, simulate, sweep, family, serve.

Exit codes: 0 success, 2 input/parse errors, 3 analysis errors.  Floating
output is printed to 6 significant digits; JSON carries full precision.
The DCL_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .dynamics import (
    load_scenario,
    oscillation_fit,
    predicted_limit,
    run_scenario,
    trajectory_to_csv,
)
from .errors import AnalysisError, DclabError, GraphError, SimulationError
from .graphio import FAMILY_PARAMS, parse_family_spec, resolve_graph_source, save_graph
from .graphs import deformed_laplacian, generate_family
from .qep import sweep_threshold, classify_at
from .reports import analyze_source
from .spectra import family_spectrum

log = logging.getLogger("dclab")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ANALYSIS = 3


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _fmt_interval(pair) -> str:
    lo, hi = pair
    lo_s = "-inf" if lo == "-inf" else _fmt(float(lo))
    hi_s = "+inf" if hi == "+inf" else _fmt(float(hi))
    return f"({lo_s}, {hi_s})"


def _graph_arg(args) -> str:
    if args.family:
        return args.family
    if args.graph:
        return args.graph
    raise GraphError("either a graph file or --family is required")


def _print_report_text(report: dict) -> None:
    print(f"graph: {report['graph']}")
    print(f"method: {report['method']}")
    stable = " U ".join(_fmt_interval(p) for p in report["stable"]) or "(none)"
    unstable = " U ".join(_fmt_interval(p) for p in report["unstable"]) or "(none)"
    print(f"stable: {stable}")
    print(f"unstable: {unstable}")
    print("marginal:")
    for m in report["marginal"]:
        extra = ""
        if "groups" in m:
            extra = "  groups " + " | ".join(
                "{" + ",".join(str(v) for v in grp) + "}" for grp in m["groups"]
            )
        if "frequency" in m:
            extra += f"  frequency {_fmt(m['frequency'])} Hz"
        print(f"  s = {_fmt(m['s'])}  {m['kind']}{extra}")
    if "q_coefficients" in report:
        coeffs = ", ".join(_fmt(c) for c in report["q_coefficients"])
        print(f"q(s) coefficients (low to high): [{coeffs}]")


def cmd_analyze(args) -> int:
    report = analyze_source(_graph_arg(args))
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        _print_report_text(report)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    source = _graph_arg(args)
    s = args.s
    if args.family:
        spec = family_spectrum(parse_family_spec(args.family), s)
        eigs = sorted(spec.eigenvalues, key=lambda z: (z.real, z.imag))
        provenance = spec.provenance
        label = args.family
    else:
        g = resolve_graph_source(source)
        w = np.linalg.eigvals(-deformed_laplacian(g, s))
        eigs = sorted((complex(v) for v in w), key=lambda z: (z.real, z.imag))
        provenance = "numeric"
        label = g.label()
    if args.format == "json":
        payload = {
            "graph": label,
            "s": s,
            "provenance": provenance,
            "eigenvalues": [[z.real, z.imag] for z in eigs],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"graph: {label}")
        print(f"s = {_fmt(s)}   eigenvalues of -Delta(s)  [{provenance}]")
        for z in eigs:
            if abs(z.imag) < 1e-12:
                print(f"  {_fmt(z.real)}")
            else:
                print(f"  {_fmt(z.real)} {'+' if z.imag >= 0 else '-'} {_fmt(abs(z.imag))}j")
    return EXIT_OK


def cmd_family(args) -> int:
    g = generate_family(parse_family_spec(args.spec))
    if args.output:
        save_graph(g, args.output)
        print(f"wrote {args.output}")
    else:
        from .graphio import graph_to_dict

        print(json.dumps(graph_to_dict(g), indent=2))
    return EXIT_OK


def _simulate_summary(scenario, traj, wall: float) -> dict:
    summary: dict = {
        "scenario": scenario.name or "scenario",
        "graph": scenario.graph.label(),
        "status": traj.status,
        "converged": traj.converged_at is not None,
        "converged_at": traj.converged_at,
        "t_end": float(traj.times[-1]),
        "s_final": float(traj.s_values[-1]),
        "final_state": [float(v) for v in traj.final_state],
        "wall_time_s": wall,
    }
    if traj.status == "divergent":
        return summary

    t_last, s_last = scenario.schedule.segments[-1]
    start_idx = int(np.searchsorted(traj.times, t_last - 1e-12))
    seg_start = traj.states[start_idx]
    try:
        if scenario.planar:
            px = predicted_limit(scenario.graph, s_last, seg_start[0::2])
            py = predicted_limit(scenario.graph, s_last, seg_start[1::2])
            if px.kind == "limit" or px.kind == "zero":
                vec = np.empty(len(seg_start))
                vec[0::2] = px.vector
                vec[1::2] = py.vector
                summary["predicted"] = {"kind": px.kind, "vector": vec.tolist()}
            else:
                summary["predicted"] = {"kind": px.kind}
        else:
            p = predicted_limit(scenario.graph, s_last, seg_start)
            entry: dict = {"kind": p.kind}
            if p.vector is not None:
                entry["vector"] = [float(v) for v in p.vector]
            if p.oscillation is not None:
                entry["frequency"] = float(p.oscillation["frequency"])
            summary["predicted"] = entry
    except DclabError as exc:
        summary["predicted"] = {"kind": "unavailable", "reason": str(exc)}

    if summary.get("predicted", {}).get("kind") == "oscillation":
        t0 = t_last + 0.4 * (traj.times[-1] - t_last)
        try:
            fit = oscillation_fit(traj, (float(t0), float(traj.times[-1])))
            summary["fit"] = {
                "frequency": fit.frequency,
                "amplitudes": fit.amplitudes.tolist(),
                "phases": fit.phases.tolist(),
                "residual": fit.residual,
            }
        except SimulationError as exc:
            summary["fit"] = {"error": str(exc)}
    return summary


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = scenario.name or Path(args.scenario).stem

    start = time.perf_counter()
    traj = run_scenario(scenario)
    wall = time.perf_counter() - start

    csv_path = outdir / f"{stem}.csv"
    trajectory_to_csv(traj, csv_path)
    summary = _simulate_summary(scenario, traj, wall)
    summary_path = outdir / f"{stem}.summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"trajectory: {csv_path}")
    print(f"summary: {summary_path}")
    print(f"status: {summary['status']}  t_end: {_fmt(summary['t_end'])}  wall: {wall:.3f}s")
    return EXIT_OK


def cmd_sweep(args) -> int:
    g = resolve_graph_source(_graph_arg(args))
    thr = sweep_threshold(g, args.from_s, args.to_s, coarse_step=args.step)
    below = classify_at(g, thr - max(1e-4, args.step / 10))
    above = classify_at(g, thr + max(1e-4, args.step / 10))
    if args.format == "json":
        print(json.dumps({"graph": g.label(), "threshold": thr, "below": below, "above": above}))
    else:
        print(f"graph: {g.label()}")
        print(f"threshold: s = {_fmt(thr)}")
        print(f"  s < threshold: {below}")
        print(f"  s > threshold: {above}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcl",
        description="Deformed consensus laboratory: stability analysis and simulation",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_graph_args(p):
        p.add_argument("graph", nargs="?", help="graph JSON file")
        p.add_argument("--family", help=f"family spec, e.g. {', '.join(sorted(FAMILY_PARAMS))}")

    p = sub.add_parser("analyze", help="print the s-stability report of a graph")
    add_graph_args(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", help="eigenvalues of -Delta(s) at one s value")
    add_graph_args(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("family", help="write a named family graph as JSON")
    p.add_argument("spec", help="family spec, e.g. mtree:2:3")
    p.add_argument("-o", "--output", help="output file (stdout when omitted)")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("simulate", help="run a scenario file; write CSV + summary")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="bisect a stability threshold on [from, to]")
    add_graph_args(p)
    p.add_argument("--from", dest="from_s", type=float, required=True)
    p.add_argument("--to", dest="to_s", type=float, required=True)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="launch the steering service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("DCL_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, OSError, ValueError, json.JSONDecodeError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except DclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
