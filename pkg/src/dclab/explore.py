"""Search five-vertex nonbipartite graphs for notable marginal thresholds.

Exploration helper, not part of the tested surface: enumerates all graphs
on five vertices and reports those whose marginal stability point matches
one of the requested threshold values.  Run as ``python -m dclab.explore``.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graphs import build_graph, structure_probe
from .qep import MultiplicityAboveOneError, stability_intervals

DEFAULT_TARGETS = (0.7022, 0.4396, 0.3804)


def search_five_vertex_thresholds(targets=DEFAULT_TARGETS, tol: float = 5e-4):
    """Yield (graph, threshold, target, groups) for matching 5-vertex graphs."""
    pairs = list(combinations(range(1, 6), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        if len(edges) < 4:
            continue
        g = build_graph(5, edges)
        probe = structure_probe(g)
        if not probe.connected or probe.bipartite:
            continue
        try:
            report = stability_intervals(g)
        except MultiplicityAboveOneError:
            continue
        for mode in report.marginal:
            for target in targets:
                if abs(mode.s_star - target) <= tol:
                    yield g, mode.s_star, target, mode.groups


def main() -> None:
    print("five-vertex nonbipartite graphs with matching marginal thresholds")
    count = 0
    for g, s_star, target, groups in search_five_vertex_thresholds():
        count += 1
        grp = " | ".join("{" + ",".join(map(str, grp)) + "}" for grp in groups or ())
        edges = sorted(g.edges)
        print(f"  target {target}: s* = {s_star:.6f}  edges {edges}  groups {grp}")
    print(f"{count} matches")


if __name__ == "__main__":
    main()
