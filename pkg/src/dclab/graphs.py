"""Graph construction, named families, derived matrices, and structure probes.

Conventions used throughout the package:

* vertices are 1-based integers ``1..n``;
* undirected edges are stored once as ``(i, j)`` with ``i < j``;
* directed edges are ``(tail, head)``;
* for directed graphs the adjacency matrix follows the in-neighbour
  convention ``a_ij = 1 iff (j, i) in E`` and the degree matrix holds
  in-degrees, so ``L = D - A`` is the in-degree Laplacian.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    DuplicateEdgeError,
    ParameterOutOfRangeError,
    SelfLoopError,
    VertexOutOfRangeError,
)

__all__ = [
    "Graph",
    "GraphFamily",
    "MatrixBundle",
    "StructureReport",
    "FAMILY_PARAMS",
    "build_graph",
    "generate_family",
    "matrices",
    "deformed_laplacian",
    "structure_probe",
]


@dataclass(frozen=True)
class Graph:
    """A finite simple graph (or digraph) with 1-based vertex ids."""

    n: int
    edges: frozenset[tuple[int, int]]
    directed: bool = False
    name: str | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def label(self) -> str:
        """Short human-readable identifier used in reports and trajectories."""
        if self.name:
            return self.name
        kind = "digraph" if self.directed else "graph"
        return f"{kind}(n={self.n},m={self.num_edges})"

    def __repr__(self) -> str:  # keep reprs short; edge sets can be large
        return f"Graph({self.label()})"


@dataclass(frozen=True)
class MatrixBundle:
    """Adjacency, degree, Laplacian and signless Laplacian of a graph."""

    A: np.ndarray
    D: np.ndarray
    L: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class StructureReport:
    """Structural flags of a graph; directed-only fields are None otherwise."""

    connected: bool | None
    bipartite: bool
    partition: tuple[tuple[int, ...], tuple[int, ...]] | None
    regular_degree: int | None
    max_degree: int
    strongly_connected: bool | None = None
    weakly_connected: bool | None = None
    balanced: bool | None = None
    has_rooted_out_branching: bool | None = None


def build_graph(n: int, edges, directed: bool = False, name: str | None = None) -> Graph:
    """Validate and canonicalize a vertex count plus edge list into a Graph.

    Undirected edges are normalized to (min, max); self-loops, duplicate
    edges and out-of-range endpoints are rejected.
    """
    if n < 1:
        raise ParameterOutOfRangeError(f"vertex count must be >= 1, got {n}")
    canonical: set[tuple[int, int]] = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if not (1 <= i <= n and 1 <= j <= n):
            raise VertexOutOfRangeError(f"edge ({i},{j}) outside 1..{n}")
        if i == j:
            raise SelfLoopError(f"self-loop ({i},{i}) not allowed")
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in canonical:
            raise DuplicateEdgeError(f"duplicate edge ({i},{j})")
        canonical.add(key)
    return Graph(n=n, edges=frozenset(canonical), directed=directed, name=name)


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------

#: parameter names per family kind, in positional order
FAMILY_PARAMS: dict[str, tuple[str, ...]] = {
    "path": ("n",),
    "cycle": ("n",),
    "mtree": ("m", "depth"),
    "wheel": ("n",),
    "hypercube": ("m",),
    "petersen": (),
    "complete": ("n",),
    "bipartite": ("m", "n"),
    "star": ("n",),
    "directed-path": ("n",),
    "directed-cycle": ("n",),
}


@dataclass(frozen=True)
class GraphFamily:
    """A named graph family plus its integer size parameters.

    ``star(n)`` is the star with n leaves (n+1 vertices); ``mtree(m, depth)``
    is the full m-ary tree; ``hypercube(m)`` has 2**m vertices.
    """

    kind: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in FAMILY_PARAMS:
            raise ParameterOutOfRangeError(f"unknown family {self.kind!r}")
        expected = len(FAMILY_PARAMS[self.kind])
        if len(self.params) != expected:
            raise ParameterOutOfRangeError(
                f"family {self.kind!r} takes {expected} parameter(s), got {len(self.params)}"
            )
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))

    def spec(self) -> str:
        """Single-token form, e.g. ``mtree:2:3``."""
        return ":".join([self.kind] + [str(p) for p in self.params])

    @property
    def directed(self) -> bool:
        return self.kind.startswith("directed-")


def _family_vertex_count(fam: GraphFamily) -> int:
    k, p = fam.kind, fam.params
    if k in ("path", "cycle", "wheel", "complete", "directed-path", "directed-cycle"):
        return p[0]
    if k == "mtree":
        m, depth = p
        return sum(m**i for i in range(depth + 1))
    if k == "hypercube":
        return 2 ** p[0]
    if k == "petersen":
        return 10
    if k == "bipartite":
        return p[0] + p[1]
    if k == "star":
        return p[0] + 1
    raise AssertionError(k)


def _validate_family(fam: GraphFamily) -> None:
    k, p = fam.kind, fam.params
    ok = True
    if k == "path":
        ok = p[0] >= 2
    elif k == "cycle":
        ok = p[0] > 2
    elif k == "mtree":
        ok = p[0] >= 2 and p[1] >= 1
    elif k == "wheel":
        ok = p[0] > 3
    elif k == "hypercube":
        ok = 2 ** p[0] > 4
    elif k == "complete":
        ok = p[0] > 2
    elif k == "bipartite":
        ok = p[0] >= 2 and p[1] >= 2
    elif k == "star":
        ok = p[0] >= 3
    elif k == "directed-path":
        ok = p[0] >= 2
    elif k == "directed-cycle":
        ok = p[0] > 2
    if not ok:
        raise ParameterOutOfRangeError(f"family parameters out of range: {fam.spec()}")


def generate_family(fam: GraphFamily) -> Graph:
    """Build the canonical labeled graph of a named family.

    Labelings: path/cycle follow the walk; mtree is labeled in BFS order
    with root 1; wheel has center 1 and rim 2..n in cycle order; hypercube
    vertex i+1 is the binary expansion of i; bipartite lists one side then
    the other; the Petersen graph is the outer 5-cycle 1..5 plus the inner
    pentagram 6..10 with spokes i <-> i+5; directed cycles run i -> i+1 and
    n -> 1.
    """
    _validate_family(fam)
    k, p = fam.kind, fam.params
    edges: list[tuple[int, int]] = []
    directed = fam.directed

    if k == "path":
        n = p[0]
        edges = [(i, i + 1) for i in range(1, n)]
    elif k == "cycle":
        n = p[0]
        edges = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    elif k == "mtree":
        m, depth = p
        n = _family_vertex_count(fam)
        internal = sum(m**i for i in range(depth))
        for v in range(1, internal + 1):
            for c in range(m * (v - 1) + 2, m * v + 2):
                edges.append((v, c))
    elif k == "wheel":
        n = p[0]
        edges = [(1, j) for j in range(2, n + 1)]
        edges += [(j, j + 1) for j in range(2, n)] + [(2, n)]
    elif k == "hypercube":
        m = p[0]
        n = 2**m
        for x in range(n):
            for b in range(m):
                y = x ^ (1 << b)
                if x < y:
                    edges.append((x + 1, y + 1))
    elif k == "petersen":
        n = 10
        edges = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]
        edges += [(i, i + 5) for i in range(1, 6)]
        edges += [(6, 8), (7, 9), (8, 10), (6, 9), (7, 10)]
    elif k == "complete":
        n = p[0]
        edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    elif k == "bipartite":
        m, nn = p
        n = m + nn
        edges = [(i, j) for i in range(1, m + 1) for j in range(m + 1, n + 1)]
    elif k == "star":
        n = p[0] + 1
        edges = [(1, j) for j in range(2, n + 1)]
    elif k == "directed-path":
        n = p[0]
        edges = [(i, i + 1) for i in range(1, n)]
    elif k == "directed-cycle":
        n = p[0]
        edges = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    else:
        raise AssertionError(k)

    return build_graph(n, edges, directed=directed, name=fam.spec())


def hypercube_adjacency_eigenvalues(m: int) -> list[tuple[int, int]]:
    """Adjacency eigenvalues (value, multiplicity) of the m-cube: m-2l with C(m,l)."""
    return [(m - 2 * ell, comb(m, ell)) for ell in range(m + 1)]


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def adjacency(g: Graph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    if g.directed:
        for (u, v) in g.edges:
            A[v - 1, u - 1] = 1.0
    else:
        for (i, j) in g.edges:
            A[i - 1, j - 1] = 1.0
            A[j - 1, i - 1] = 1.0
    return A


def matrices(g: Graph) -> MatrixBundle:
    """Adjacency A, degree D (in-degree for digraphs), L = D - A, Q = D + A."""
    A = adjacency(g)
    D = np.diag(A.sum(axis=1))
    return MatrixBundle(A=A, D=D, L=D - A, Q=D + A)


def deformed_laplacian(g: Graph, s: float) -> np.ndarray:
    """The second-degree matrix polynomial (D - I) s^2 - A s + I.

    Equals L at s=1, Q at s=-1 and the identity at s=0; symmetric whenever
    the graph is undirected.
    """
    if not np.isfinite(s):
        raise ParameterOutOfRangeError(f"s must be finite, got {s}")
    A = adjacency(g)
    D = np.diag(A.sum(axis=1))
    eye = np.eye(g.n)
    return (D - eye) * s**2 - A * s + eye


# ---------------------------------------------------------------------------
# structure probes
# ---------------------------------------------------------------------------

def _undirected_neighbors(g: Graph) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(g.n + 1)]
    for (i, j) in g.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    return nbrs


def _out_neighbors(g: Graph) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(g.n + 1)]
    for (u, v) in g.edges:
        out[u].append(v)
    return out


def _bfs_component(nbrs, start, n) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _two_coloring(nbrs, n):
    """BFS 2-coloring; returns (is_bipartite, partition) over all components."""
    color = [0] * (n + 1)
    for start in range(1, n + 1):
        if color[start]:
            continue
        color[start] = 1
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if color[v] == 0:
                    color[v] = -color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return False, None
    side1 = tuple(v for v in range(1, n + 1) if color[v] == 1)
    side2 = tuple(v for v in range(1, n + 1) if color[v] == -1)
    return True, (side1, side2)


def _tarjan_scc_count_and_sources(g: Graph) -> tuple[int, int]:
    """Number of strongly connected components and of source components."""
    out = _out_neighbors(g)
    n = g.n
    index = [0] * (n + 1)
    low = [0] * (n + 1)
    on_stack = [False] * (n + 1)
    comp = [0] * (n + 1)
    stack: list[int] = []
    counter = [0]
    n_comp = [0]

    for root in range(1, n + 1):
        if index[root]:
            continue
        work = [(root, iter(out[root]))]
        counter[0] += 1
        index[root] = low[root] = counter[0]
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if index[v] == 0:
                    counter[0] += 1
                    index[v] = low[v] = counter[0]
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, iter(out[v])))
                    advanced = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                pu = work[-1][0]
                low[pu] = min(low[pu], low[u])
            if low[u] == index[u]:
                n_comp[0] += 1
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp[0]
                    if w == u:
                        break

    has_incoming = [False] * (n_comp[0] + 1)
    for (u, v) in g.edges:
        if comp[u] != comp[v]:
            has_incoming[comp[v]] = True
    sources = sum(1 for c in range(1, n_comp[0] + 1) if not has_incoming[c])
    return n_comp[0], sources


def structure_probe(g: Graph) -> StructureReport:
    """Connectivity, bipartiteness, regularity and digraph flags.

    Bipartiteness uses BFS 2-coloring of the disoriented graph; a digraph
    contains a rooted out-branching iff its condensation has exactly one
    source component. ``max_degree`` is the maximum row sum of A (degree,
    or in-degree for digraphs).
    """
    A = adjacency(g)
    degrees = A.sum(axis=1).astype(int)
    max_degree = int(degrees.max()) if g.n else 0

    nbrs = _undirected_neighbors(g) if not g.directed else None
    if g.directed:
        # disoriented neighbor lists for weak connectivity / 2-coloring
        dis: list[list[int]] = [[] for _ in range(g.n + 1)]
        for (u, v) in g.edges:
            dis[u].append(v)
            dis[v].append(u)
        nbrs = dis

    component = _bfs_component(nbrs, 1, g.n)
    conn = len(component) == g.n
    bip, partition = _two_coloring(nbrs, g.n)

    if not g.directed:
        regular = int(degrees[0]) if g.n and np.all(degrees == degrees[0]) else None
        return StructureReport(
            connected=conn,
            bipartite=bip,
            partition=partition,
            regular_degree=regular,
            max_degree=max_degree,
        )

    out_degrees = A.sum(axis=0).astype(int)
    n_comp, sources = _tarjan_scc_count_and_sources(g)
    return StructureReport(
        connected=None,
        bipartite=bip,
        partition=partition,
        regular_degree=None,
        max_degree=max_degree,
        strongly_connected=n_comp == 1,
        weakly_connected=conn,
        balanced=bool(np.all(degrees == out_degrees)),
        has_rooted_out_branching=sources == 1,
    )
