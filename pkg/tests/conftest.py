import numpy as np
import pytest

from dclab import build_graph


def random_connected_graph(rng, n, extra_edges=None):
    """Random spanning tree on n vertices plus a few extra undirected edges."""
    edges = set()
    for v in range(2, n + 1):
        u = int(rng.integers(1, v))
        edges.add((u, v))
    candidates = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if (i, j) not in edges
    ]
    if extra_edges is None:
        extra_edges = int(rng.integers(0, max(1, len(candidates) // 2)))
    extra_edges = min(extra_edges, len(candidates))
    if extra_edges:
        picks = rng.choice(len(candidates), size=extra_edges, replace=False)
        edges.update(candidates[k] for k in picks)
    return build_graph(n, sorted(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
