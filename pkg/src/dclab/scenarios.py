"""Built-in scenario gallery: the rendezvous, clustering and orbit demos.

Each builder returns a Scenario ready for :func:`dclab.dynamics.run_scenario`;
``write_gallery`` dumps them as JSON files consumable by ``dcl simulate``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .dynamics import Scenario, SwitchSchedule
from .graphio import graph_to_dict, parse_family_spec
from .graphs import build_graph, generate_family
from .spectra import directed_cycle_oscillation

__all__ = [
    "fig1_rendezvous",
    "fig7_cycle_clustering",
    "fig8_orbit_then_average",
    "fig8_chord_orbit_then_consensus",
    "d5_plus_chord",
    "gallery",
    "write_gallery",
]


def d5_plus_chord(orientation: tuple[int, int] = (1, 3)):
    """Directed 5-cycle plus one chord between vertices 1 and 3."""
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), orientation]
    u, v = orientation
    return build_graph(5, edges, directed=True, name=f"d5+chord{u}-{v}")


def fig1_rendezvous() -> Scenario:
    """Six path-coupled planar agents split into two groups (s = -1), then
    rendezvous at the origin after switching to s = 0."""
    g = generate_family(parse_family_spec("path:6"))
    p0 = np.array(
        [
            -3.0, 2.2,
            -2.2, 1.0,
            -3.4, 0.2,
            -2.6, -0.9,
            -3.1, -1.8,
            -2.0, -2.6,
        ]
    )
    schedule = SwitchSchedule(segments=((0.0, -1.0), (6.0, 0.0)), total_time=16.0)
    return Scenario(g, schedule, p0, 1e-3, True, name="fig1")


def fig7_cycle_clustering(radius: float = 3.0) -> Scenario:
    """Eight cycle-coupled agents on a regular octagon: s = 0 shrinks the
    formation, then s = -1 clusters even and odd agents."""
    g = generate_family(parse_family_spec("cycle:8"))
    p0 = np.empty(16)
    for i in range(8):
        ang = 2 * math.pi * i / 8
        p0[2 * i] = radius * math.cos(ang)
        p0[2 * i + 1] = radius * math.sin(ang)
    schedule = SwitchSchedule(segments=((0.0, 0.0), (1.0, -1.0)), total_time=26.0)
    return Scenario(g, schedule, p0, 1e-3, True, name="fig7")


# initial positions of the two directed five-vehicle runs, interleaved x/y
_FIG8A_P0 = [-1.5, -3.0, 2.5, 0.0, -4.0, 2.5, 4.0, -3.0, 1.5, 3.0]
_FIG8B_P0 = [-4.0, -3.0, 2.5, 0.0, -4.5, 1.0, 4.0, -3.25, -2.0, 3.0]


def fig8_orbit_then_average() -> Scenario:
    """Directed 5-cycle: common elliptical orbit at the oscillation threshold,
    then average consensus at the t = 50 centroid once s switches to 1."""
    g = generate_family(parse_family_spec("directed-cycle:5"))
    theta = directed_cycle_oscillation(5)["theta"]
    schedule = SwitchSchedule(segments=((0.0, theta), (50.0, 1.0)), total_time=100.0)
    return Scenario(g, schedule, np.array(_FIG8A_P0), 1e-3, True, name="fig8a")


def fig8_chord_orbit_then_consensus() -> Scenario:
    """Directed 5-cycle plus chord 1->3: closed orbits near the sweep
    threshold, then plain (non-average) consensus at s = 1."""
    g = d5_plus_chord((1, 3))
    schedule = SwitchSchedule(segments=((0.0, -1.6889), (50.0, 1.0)), total_time=100.0)
    return Scenario(g, schedule, np.array(_FIG8B_P0), 1e-3, True, name="fig8b")


def gallery() -> dict[str, Scenario]:
    return {
        "fig1": fig1_rendezvous(),
        "fig7": fig7_cycle_clustering(),
        "fig8a": fig8_orbit_then_average(),
        "fig8b": fig8_chord_orbit_then_consensus(),
    }


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {
        "graph": graph_to_dict(sc.graph),
        "schedule": [[t, s] for t, s in sc.schedule.segments],
        "T": sc.schedule.total_time,
        "x0": [float(v) for v in sc.x0],
        "dt": sc.dt,
    }
    if sc.name:
        doc["name"] = sc.name
    return doc


def write_gallery(directory: str | Path) -> list[Path]:
    """Write every gallery scenario as <name>.json under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, sc in gallery().items():
        path = directory / f"{name}.json"
        with open(path, "w") as fh:
            json.dump(scenario_to_dict(sc), fh, indent=2)
            fh.write("\n")
        written.append(path)
    return written
