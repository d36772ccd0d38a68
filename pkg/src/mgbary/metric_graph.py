"""Finite metric graphs: length distance, geodesic paths, and cut points.

Edges are intervals glued at vertices; the distance between two points is the
infimum of path lengths. All distances here are computed exactly from a
vertex-to-vertex shortest-path table plus closed-form handling of the at most
two ways an interior point can exit its edge, so there is no discretization
error anywhere in this module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

from .errors import GraphValidationError

# Offsets this close to an endpoint collapse to the vertex itself, so every
# location on the graph has exactly one canonical representation.
SNAP_TOL = 1e-12

_FWD = 0
_BWD = 1


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: float


@dataclass(frozen=True)
class GraphPoint:
    """A location on a metric graph: a vertex, or an interior point of an edge.

    Interior points store the offset from the edge's first endpoint ``u``.
    Offsets 0 and ``length`` are always normalized to the vertex form, so
    equality of canonical points is plain field equality.
    """

    vertex: str | None = None
    edge: str | None = None
    offset: float = 0.0

    @staticmethod
    def at_vertex(v: str) -> "GraphPoint":
        return GraphPoint(vertex=v)

    @staticmethod
    def on_edge(edge: str, offset: float) -> "GraphPoint":
        return GraphPoint(edge=edge, offset=float(offset))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self):
        if self.vertex is not None:
            return (0, self.vertex, 0.0)
        return (1, self.edge, self.offset)

    def __str__(self) -> str:
        return format_point(self)


@dataclass(frozen=True)
class OrientedEdge:
    """An edge together with a traversal direction.

    With ``reverse=False`` the first endpoint is the edge's stored ``u`` and
    oriented offsets coincide with stored offsets; with ``reverse=True`` both
    are flipped.
    """

    edge: str
    reverse: bool = False


@dataclass(frozen=True)
class GeodesicPath:
    """A shortest path: its endpoints, traversed edges with directions, length.

    ``steps`` lists ``(edge_id, forward)`` in traversal order; the first and
    last steps may cover only part of their edge when an endpoint is interior.
    """

    start: GraphPoint
    end: GraphPoint
    steps: tuple[tuple[str, bool], ...]
    length: float


class MetricGraph:
    """A validated, immutable metric graph with precomputed geodesic tables.

    Instances are built through :func:`build_graph`. All public attributes are
    read-only by convention; operations in this module are pure functions, so
    sharing a graph across threads is safe.
    """

    def __init__(self, vertices: tuple[str, ...], edges: tuple[Edge, ...]):
        self.vertices = vertices
        self.edges = edges
        self._edge_by_id = {e.id: e for e in edges}
        adj: dict[str, list[tuple[Edge, str, int]]] = {v: [] for v in vertices}
        for e in edges:
            adj[e.u].append((e, e.v, _FWD))
            adj[e.v].append((e, e.u, _BWD))
        self._adj = adj
        self.adjacency: dict[str, tuple[str, ...]] = {
            v: tuple(sorted(e.id for e, _, _ in nbrs)) for v, nbrs in adj.items()
        }
        self.min_edge_length = min(e.length for e in edges)
        self._dist: dict[str, dict[str, float]] = {}
        self._key: dict[str, dict[str, tuple]] = {}
        for v in vertices:
            d, k = self._dijkstra(v)
            self._dist[v] = d
            self._key[v] = k
        self._minimizing = {
            e.id: self._dist[e.u][e.v] >= e.length - 1e-12 * max(1.0, e.length)
            for e in edges
        }

    def _dijkstra(self, source: str):
        # Ties between equal-length paths are broken by the lexicographically
        # smallest (edge id, direction) sequence; the heap order enforces it.
        dist: dict[str, float] = {}
        key: dict[str, tuple] = {}
        heap: list[tuple[float, tuple, str]] = [(0.0, (), source)]
        while heap:
            d, k, w = heapq.heappop(heap)
            if w in dist:
                continue
            dist[w] = d
            key[w] = k
            for edge, other, flag in self._adj[w]:
                if other not in dist:
                    heapq.heappush(heap, (d + edge.length, k + ((edge.id, flag),), other))
        return dist, key

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise ValueError(f"unknown edge id {edge_id!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._adj

    def vertex_distance(self, a: str, b: str) -> float:
        return self._dist[a][b]

    def canonical(self, p: GraphPoint) -> GraphPoint:
        """Return the unique canonical representation of ``p`` on this graph."""
        if p.vertex is not None:
            if p.vertex not in self._adj:
                raise ValueError(f"unknown vertex id {p.vertex!r}")
            return GraphPoint(vertex=p.vertex)
        e = self.edge(p.edge)
        off = float(p.offset)
        if not (-1e-9 <= off <= e.length + 1e-9):
            raise ValueError(
                f"offset {off!r} outside [0, {e.length!r}] on edge {e.id!r}"
            )
        if off <= SNAP_TOL:
            return GraphPoint(vertex=e.u)
        if off >= e.length - SNAP_TOL:
            return GraphPoint(vertex=e.v)
        return GraphPoint(edge=e.id, offset=off)

    def oriented_endpoints(self, oe: OrientedEdge) -> tuple[str, str]:
        e = self.edge(oe.edge)
        return (e.v, e.u) if oe.reverse else (e.u, e.v)

    def oriented_offset(self, oe: OrientedEdge, p: GraphPoint) -> float | None:
        """Offset of ``p`` along the oriented edge, or None if ``p`` is not on it.

        Endpoint vertices map to 0 and the edge length; for a vertex incident
        to both ends of a parallel pair the first endpoint wins.
        """
        e = self.edge(oe.edge)
        p = self.canonical(p)
        e0, e1 = self.oriented_endpoints(oe)
        if p.vertex is not None:
            if p.vertex == e0:
                return 0.0
            if p.vertex == e1:
                return e.length
            return None
        if p.edge != e.id:
            return None
        return e.length - p.offset if oe.reverse else p.offset


def build_graph(spec: Mapping) -> MetricGraph:
    """Validate a graph description and build the metric graph.

    ``spec`` is a mapping with a ``vertices`` list of ids and an ``edges`` list
    of ``{"id", "u", "v", "length"}`` records. Rejects nonpositive lengths,
    self-loops, isolated vertices, and disconnected graphs, each with its own
    diagnostic. Parallel edges with distinct ids are allowed.
    """
    try:
        raw_vertices = list(spec["vertices"])
        raw_edges = list(spec["edges"])
    except (KeyError, TypeError) as exc:
        raise GraphValidationError(f"graph description missing field: {exc}") from None

    vertices = tuple(str(v) for v in raw_vertices)
    if not vertices:
        raise GraphValidationError("graph has no vertices")
    if len(set(vertices)) != len(vertices):
        raise GraphValidationError("duplicate vertex ids")
    vset = set(vertices)

    edges = []
    seen_ids: set[str] = set()
    for rec in raw_edges:
        try:
            eid, u, v, length = str(rec["id"]), str(rec["u"]), str(rec["v"]), float(rec["length"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphValidationError(f"malformed edge record: {exc}") from None
        if eid in seen_ids:
            raise GraphValidationError(f"duplicate edge id {eid!r}")
        seen_ids.add(eid)
        if u not in vset or v not in vset:
            raise GraphValidationError(f"edge {eid!r} references unknown vertex")
        if u == v:
            raise GraphValidationError(f"edge {eid!r} is a self-loop ({u!r})")
        if not (length > 0.0):
            raise GraphValidationError(
                f"edge {eid!r} has nonpositive length {length!r}; lengths must be > 0"
            )
        edges.append(Edge(eid, u, v, length))
    edges_t = tuple(sorted(edges, key=lambda e: e.id))

    degree = {v: 0 for v in vertices}
    for e in edges_t:
        degree[e.u] += 1
        degree[e.v] += 1
    isolated = sorted(v for v, d in degree.items() if d == 0)
    if isolated:
        raise GraphValidationError(f"isolated vertices (degree 0): {isolated}")

    # connectivity over the vertex skeleton
    seen = {vertices[0]}
    stack = [vertices[0]]
    nbrs: dict[str, set[str]] = {v: set() for v in vertices}
    for e in edges_t:
        nbrs[e.u].add(e.v)
        nbrs[e.v].add(e.u)
    while stack:
        w = stack.pop()
        for nxt in nbrs[w]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(vertices):
        missing = sorted(vset - seen)
        raise GraphValidationError(f"graph is disconnected; unreachable vertices: {missing}")

    return MetricGraph(vertices, edges_t)


def _exit_routes(g: MetricGraph, p: GraphPoint):
    """Ways out of ``p``: (cost to reach a vertex, vertex, exit steps)."""
    if p.vertex is not None:
        return ((0.0, p.vertex, ()),)
    e = g.edge(p.edge)
    return (
        (p.offset, e.u, ((e.id, _BWD),)),
        (e.length - p.offset, e.v, ((e.id, _FWD),)),
    )


def _flip(steps):
    return tuple((eid, _FWD if d == _BWD else _BWD) for eid, d in reversed(steps))


def _best_route(g: MetricGraph, x: GraphPoint, y: GraphPoint):
    """Minimal (cost, step key) over all route candidates from x to y.

    Candidates: the within-edge segment when both points share an edge, plus
    every combination of exits to the vertex skeleton. Interior points have at
    most two exits, so the enumeration is exact.
    """
    cands = []
    if x.edge is not None and x.edge == y.edge:
        d = _FWD if x.offset < y.offset else _BWD
        cands.append((abs(y.offset - x.offset), ((x.edge, d),)))
    for c1, w1, s1 in _exit_routes(g, x):
        row_d = g._dist[w1]
        row_k = g._key[w1]
        for c2, w2, s2 in _exit_routes(g, y):
            cands.append(((c1 + row_d[w2]) + c2, s1 + row_k[w2] + _flip(s2)))
    return min(cands)


def distance(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> float:
    """Length distance between two points of the graph.

    Symmetric by construction: the pair is evaluated in a canonical order, so
    ``distance(g, x, y)`` and ``distance(g, y, x)`` return the same float.
    """
    x = g.canonical(x)
    y = g.canonical(y)
    if x == y:
        return 0.0
    if y.sort_key() < x.sort_key():
        x, y = y, x
    return _best_route(g, x, y)[0]


def shortest_path(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> GeodesicPath:
    """A geodesic from ``x`` to ``y`` whose length equals ``distance(g, x, y)``.

    Among equal-length paths the lexicographically smallest
    (edge id, direction) sequence is returned, which makes the result
    reproducible across runs.
    """
    x = g.canonical(x)
    y = g.canonical(y)
    if x == y:
        return GeodesicPath(start=x, end=y, steps=(), length=0.0)
    swapped = y.sort_key() < x.sort_key()
    a, b = (y, x) if swapped else (x, y)
    cost, steps = _best_route(g, a, b)
    if swapped:
        steps = _flip(steps)
    public = tuple((eid, d == _FWD) for eid, d in steps)
    return GeodesicPath(start=x, end=y, steps=public, length=cost)


def path_segment_lengths(g: MetricGraph, path: GeodesicPath) -> tuple[float, ...]:
    """Lengths of the sub-segments a geodesic traverses, in order."""
    out = []
    cur = path.start
    for i, (eid, forward) in enumerate(path.steps):
        e = g.edge(eid)
        entry = cur.offset if cur.edge == eid else (0.0 if forward else e.length)
        last = i == len(path.steps) - 1
        if last and path.end.edge == eid:
            exit_off = path.end.offset
            cur = path.end
        else:
            exit_off = e.length if forward else 0.0
            cur = GraphPoint(vertex=e.v if forward else e.u)
        out.append(abs(exit_off - entry))
    return tuple(out)


def is_edge_minimizing(g: MetricGraph, edge_id: str) -> bool:
    """True iff the distance between the edge's endpoints equals its length."""
    g.edge(edge_id)
    return g._minimizing[edge_id]


def cut_points_from(g: MetricGraph, v: str) -> list[tuple[str, float]]:
    """Interior points reachable from vertex ``v`` by two ways out of their edge.

    For each edge {a, b} there is at most one interior offset where the route
    through ``a`` and the route through ``b`` are equally short; it is emitted
    whenever it falls strictly inside the edge. Both route values then realize
    the true distance, since any path to an interior point enters through one
    of the endpoints.
    """
    if not g.has_vertex(v):
        raise ValueError(f"unknown vertex id {v!r}")
    out = []
    row = g._dist[v]
    for e in g.edges:
        t = 0.5 * (row[e.v] - row[e.u] + e.length)
        if SNAP_TOL < t < e.length - SNAP_TOL:
            out.append((e.id, t))
    return sorted(out)


def parse_point(g: MetricGraph, literal: str) -> GraphPoint:
    """Parse a point literal: ``v:<vertexid>`` or ``<edgeid>:<offset>``.

    Offsets are measured from the edge's endpoint ``u``.
    """
    if literal.startswith("v:"):
        return g.canonical(GraphPoint.at_vertex(literal[2:]))
    eid, sep, off = literal.rpartition(":")
    if not sep or not eid:
        raise ValueError(f"bad point literal {literal!r}")
    return g.canonical(GraphPoint.on_edge(eid, float(off)))


def format_point(p: GraphPoint, digits: int | None = None) -> str:
    """Format a point as its literal; ``digits`` limits significant digits."""
    if p.vertex is not None:
        return f"v:{p.vertex}"
    off = f"{p.offset:.{digits}g}" if digits is not None else repr(p.offset)
    return f"{p.edge}:{off}"


def graph_to_json(g: MetricGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "u": e.u, "v": e.v, "length": e.length} for e in g.edges
        ],
    }
