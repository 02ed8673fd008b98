"""Graph file format and family spec parsing.

A graph document is JSON with either explicit structure::

    {"n": 5, "directed": false, "edges": [[1, 2], [2, 3]], "name": "demo"}

or a family reference such as ``{"family": "cycle", "n": 8}`` /
``{"family": "mtree", "m": 2, "depth": 3}``.  The single-token spec syntax
``name:params`` (e.g. ``mtree:2:3``, ``directed-cycle:5``) denotes the same
families on the command line.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParameterOutOfRangeError
from .graphs import FAMILY_PARAMS, Graph, GraphFamily, build_graph, generate_family

__all__ = [
    "parse_family_spec",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "save_graph",
    "resolve_graph_source",
]


def parse_family_spec(spec: str) -> GraphFamily:
    """Parse ``name:params`` into a GraphFamily, e.g. ``complete:5``."""
    parts = spec.strip().split(":")
    kind = parts[0].lower()
    if kind not in FAMILY_PARAMS:
        raise ParameterOutOfRangeError(f"unknown family {kind!r}")
    try:
        params = tuple(int(p) for p in parts[1:])
    except ValueError as exc:
        raise ParameterOutOfRangeError(f"non-integer parameter in {spec!r}") from exc
    return GraphFamily(kind=kind, params=params)


def family_from_dict(doc: dict) -> GraphFamily:
    kind = str(doc["family"]).lower()
    if kind not in FAMILY_PARAMS:
        raise ParameterOutOfRangeError(f"unknown family {kind!r}")
    try:
        params = tuple(int(doc[name]) for name in FAMILY_PARAMS[kind])
    except KeyError as exc:
        raise ParameterOutOfRangeError(f"family {kind!r} needs parameter {exc}") from exc
    return GraphFamily(kind=kind, params=params)


def graph_from_dict(doc: dict) -> Graph:
    """Build a Graph from a parsed graph document (explicit or family form)."""
    if "family" in doc:
        return generate_family(family_from_dict(doc))
    try:
        n = int(doc["n"])
        edges = [(int(e[0]), int(e[1])) for e in doc["edges"]]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParameterOutOfRangeError(f"malformed graph document: {exc}") from exc
    directed = bool(doc.get("directed", False))
    name = doc.get("name")
    return build_graph(n, edges, directed=directed, name=name)


def graph_to_dict(g: Graph) -> dict:
    doc = {
        "n": g.n,
        "directed": g.directed,
        "edges": sorted([list(e) for e in g.edges]),
    }
    if g.name:
        doc["name"] = g.name
    return doc


def load_graph(path: str | Path) -> Graph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def save_graph(g: Graph, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(g), fh, indent=2)
        fh.write("\n")


def resolve_graph_source(source: str | dict | Graph | GraphFamily) -> Graph:
    """Accept a Graph, GraphFamily, family spec string, file path, or dict."""
    if isinstance(source, Graph):
        return source
    if isinstance(source, GraphFamily):
        return generate_family(source)
    if isinstance(source, dict):
        return graph_from_dict(source)
    text = str(source)
    head = text.split(":", 1)[0].lower()
    if head in FAMILY_PARAMS:
        return generate_family(parse_family_spec(text))
    return load_graph(text)
