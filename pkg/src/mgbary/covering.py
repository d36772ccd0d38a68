"""Unfolding a metric graph onto the real line around a base edge.

Relative to an oriented minimizing edge and a base measure supported on it,
every target measure is pushed to the line through three distance maps: the
edge itself covers [0, length], everything reached through the far endpoint
lands beyond ``length``, and everything reached through the near endpoint
lands below 0. Which map applies to which mass is read off an optimal plan
from the base measure, decomposed by geodesic class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import MeasureValidationError
from .line_ot import LineMeasure, line_measure
from .metric_graph import (
    GraphPoint,
    MetricGraph,
    OrientedEdge,
    cut_points_from,
    distance,
)
from .transport import (
    BranchTag,
    DiscreteMeasure,
    _require_minimizing,
    classify_pair,
    w2_graph,
)

EXC_TOL = 1e-9


@dataclass(frozen=True)
class CoverContext:
    """Base data of the unfolding: graph, oriented minimizing edge, base measure.

    Built through :func:`make_cover_context`, which checks that the edge is
    minimizing and that the base measure lives on its closure.
    """

    graph: MetricGraph
    edge: OrientedEdge
    base: DiscreteMeasure


def make_cover_context(
    g: MetricGraph, oe: OrientedEdge | str, base: DiscreteMeasure
) -> CoverContext:
    if isinstance(oe, str):
        oe = OrientedEdge(oe)
    _require_minimizing(g, oe)
    for p in base.points:
        if g.oriented_offset(oe, p) is None:
            raise MeasureValidationError(
                f"base measure has mass at {p}, off edge {oe.edge!r}"
            )
    return CoverContext(graph=g, edge=oe, base=base)


def h_eval(ctx: CoverContext, tag: BranchTag, y: GraphPoint) -> float:
    """Evaluate the branch map for ``tag`` at a point of the graph.

    All three maps are 1-Lipschitz: E measures distance from the oriented
    first endpoint, PLUS adds the edge length to the distance from the second
    endpoint, MINUS negates the distance from the first endpoint.
    """
    g = ctx.graph
    e = g.edge(ctx.edge.edge)
    e0, e1 = g.oriented_endpoints(ctx.edge)
    if tag is BranchTag.E:
        return distance(g, GraphPoint.at_vertex(e0), y)
    if tag is BranchTag.PLUS:
        return e.length + distance(g, GraphPoint.at_vertex(e1), y)
    return -distance(g, GraphPoint.at_vertex(e0), y)


def phi(ctx: CoverContext, nu: DiscreteMeasure) -> LineMeasure:
    """Push a measure on the graph to the line through the unfolding.

    An optimal plan from the base measure to ``nu`` is computed, each pair is
    classified by geodesic class, and each target point goes through the
    matching branch map. A target whose pairs all share one class keeps its
    weight verbatim, so measures supported on the base edge map to themselves
    (as offsets) exactly.
    """
    g = ctx.graph
    _, plan = w2_graph(g, ctx.base, nu)
    groups: dict[GraphPoint, dict[BranchTag, float]] = {}
    for x, y, mass in plan.entries:
        tag = classify_pair(g, ctx.edge, x, y)
        bucket = groups.setdefault(y, {})
        bucket[tag] = bucket.get(tag, 0.0) + mass

    weights = nu.as_dict()
    atoms: list[tuple[float, float]] = []
    for y, tags in groups.items():
        if len(tags) == 1:
            (tag,) = tags
            atoms.append((h_eval(ctx, tag, y), weights[y]))
        else:
            # a cut pair: the plan's split between classes is the selection
            for tag, mass in tags.items():
                atoms.append((h_eval(ctx, tag, y), mass))
    return line_measure(atoms=atoms)


def _anchor_vertex(ctx: CoverContext, tag: BranchTag) -> str:
    e0, e1 = ctx.graph.oriented_endpoints(ctx.edge)
    return e1 if tag is BranchTag.PLUS else e0


def exceptional_set(ctx: CoverContext, tag: BranchTag) -> tuple[float, ...]:
    """Branch-map images of vertices and cut points, where multiplicity jumps."""
    g = ctx.graph
    values = {h_eval(ctx, tag, GraphPoint.at_vertex(v)) for v in g.vertices}
    for eid, off in cut_points_from(g, _anchor_vertex(ctx, tag)):
        values.add(h_eval(ctx, tag, GraphPoint.on_edge(eid, off)))
    return tuple(sorted(values))


def preimage_count(ctx: CoverContext, tag: BranchTag, x_tilde: float) -> int:
    """Number of branch-domain points mapping to ``x_tilde``.

    The E map is counted on the base edge itself; PLUS and MINUS are counted
    on the rest of the graph, matching the three ranges [0, length],
    (length, inf), (-inf, 0) of the unfolding. The count is constant between
    consecutive exceptional values; queries within 1e-9 of one are rejected
    because the multiplicity genuinely jumps there.
    """
    exc = exceptional_set(ctx, tag)
    near = min((abs(x_tilde - d) for d in exc), default=float("inf"))
    if near <= EXC_TOL:
        raise ValueError(
            f"query {x_tilde!r} is within {EXC_TOL} of an exceptional value"
        )
    g = ctx.graph
    e = g.edge(ctx.edge.edge)
    if tag is BranchTag.E:
        return 1 if 0.0 < x_tilde < e.length else 0
    r = x_tilde - e.length if tag is BranchTag.PLUS else -x_tilde
    if r < 0.0:
        return 0
    w = _anchor_vertex(ctx, tag)
    count = 0
    for f in g.edges:
        if f.id == e.id:
            continue
        du, dv = g.vertex_distance(w, f.u), g.vertex_distance(w, f.v)
        t_rise = r - du
        if 0.0 < t_rise < f.length and du + t_rise < dv + (f.length - t_rise):
            count += 1
        t_fall = dv + f.length - r
        if 0.0 < t_fall < f.length and dv + (f.length - t_fall) < du + t_fall:
            count += 1
    return count


def lift_line_plan(
    ctx: CoverContext,
    tag: BranchTag,
    theta_tilde: Sequence[tuple[float, float, float]],
    nu: DiscreteMeasure,
) -> tuple[tuple[float, GraphPoint, float], ...]:
    """Lift a plan on the line to a plan from the line into the graph.

    Each target value of ``theta_tilde`` is spread over its branch-map
    preimages inside the support of ``nu``, proportionally to the weights of
    ``nu``; pushing the result back through the branch map reproduces
    ``theta_tilde`` entry by entry.
    """
    h_vals = {p: h_eval(ctx, tag, p) for p in nu.points}
    weights = nu.as_dict()
    entries: list[tuple[float, GraphPoint, float]] = []
    for s, y_tilde, mass in theta_tilde:
        if mass <= 0.0:
            continue
        pre = [p for p in nu.points if abs(h_vals[p] - y_tilde) <= EXC_TOL]
        if not pre:
            raise ValueError(
                f"target value {y_tilde!r} has no preimage in the support of nu"
            )
        if len(pre) == 1:
            entries.append((float(s), pre[0], mass))
            continue
        total = sum(weights[p] for p in pre)
        for p in pre:
            entries.append((float(s), p, mass * weights[p] / total))
    entries.sort(key=lambda e: (e[0], e[1].sort_key()))
    return tuple(entries)


def measure_on_edge_as_line(
    g: MetricGraph, oe: OrientedEdge | str, m: DiscreteMeasure
) -> LineMeasure:
    """View a measure supported on one edge as a measure on [0, length]."""
    if isinstance(oe, str):
        oe = OrientedEdge(oe)
    atoms = []
    for p, w in zip(m.points, m.weights):
        off = g.oriented_offset(oe, p)
        if off is None:
            raise MeasureValidationError(f"point {p} is not on edge {oe.edge!r}")
        atoms.append((off, w))
    return line_measure(atoms=atoms)
