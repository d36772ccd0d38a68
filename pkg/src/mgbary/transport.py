"""Discrete optimal transport on metric graphs.

Measures are discretized onto finite supports and couplings are solved as
exact linear programs over the squared length distance. Plans are kept as
explicit point-pair lists with marginal bookkeeping so downstream consumers
(decomposition by geodesic class, restriction maps, the line unfolding) can
reuse them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import (
    MeasureValidationError,
    NonMinimizingEdgeError,
    SolverConsistencyError,
)
from .metric_graph import (
    GraphPoint,
    MetricGraph,
    OrientedEdge,
    distance,
    format_point,
    is_edge_minimizing,
    parse_point,
)

MASS_TOL = 1e-12
MARGINAL_TOL = 1e-10
COST_TOL = 1e-9


@dataclass(frozen=True)
class GraphMeasure:
    """A probability measure on a graph: point atoms plus per-edge densities.

    ``pieces`` holds ``(edge_id, a, b, density)`` with offsets measured from
    the edge's endpoint ``u``; densities are with respect to arclength.
    """

    atoms: tuple[tuple[GraphPoint, float], ...] = ()
    pieces: tuple[tuple[str, float, float, float], ...] = ()

    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + sum(
            d * (b - a) for _, a, b, d in self.pieces
        )

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    @property
    def has_density(self) -> bool:
        return bool(self.pieces)


def graph_measure(
    g: MetricGraph,
    atoms: Iterable[tuple[GraphPoint, float]] = (),
    pieces: Iterable[tuple[str, float, float, float]] = (),
) -> GraphMeasure:
    """Canonicalize and validate a measure on ``g``."""
    merged: dict[GraphPoint, float] = {}
    for p, m in atoms:
        m = float(m)
        if m < -MASS_TOL:
            raise MeasureValidationError(f"negative atom mass {m!r}")
        if m <= 0.0:
            continue
        cp = g.canonical(p)
        merged[cp] = merged.get(cp, 0.0) + m
    atoms_t = tuple(sorted(merged.items(), key=lambda it: it[0].sort_key()))

    per_edge: dict[str, list[tuple[float, float, float]]] = {}
    for eid, a, b, d in pieces:
        e = g.edge(eid)
        a, b, d = float(a), float(b), float(d)
        if d < -MASS_TOL:
            raise MeasureValidationError(f"negative density {d!r} on edge {eid!r}")
        if b <= a:
            continue
        if a < -1e-9 or b > e.length + 1e-9:
            raise MeasureValidationError(
                f"piece [{a!r}, {b!r}) outside edge {eid!r} of length {e.length!r}"
            )
        a, b = max(a, 0.0), min(b, e.length)
        if d > 0.0:
            per_edge.setdefault(eid, []).append((a, b, d))
    pieces_l = []
    for eid in sorted(per_edge):
        runs = sorted(per_edge[eid])
        for i in range(1, len(runs)):
            if runs[i][0] < runs[i - 1][1] - MASS_TOL:
                raise MeasureValidationError(f"overlapping pieces on edge {eid!r}")
        pieces_l.extend((eid, a, b, d) for a, b, d in runs)
    m = GraphMeasure(atoms=atoms_t, pieces=tuple(pieces_l))
    total = m.total_mass()
    if abs(total - 1.0) > 1e-9:
        raise MeasureValidationError(f"total mass {total!r} is not 1")
    return m


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finitely supported probability measure with canonical point order."""

    points: tuple[GraphPoint, ...]
    weights: tuple[float, ...]

    def as_dict(self) -> dict[GraphPoint, float]:
        return dict(zip(self.points, self.weights))


def discrete_measure(
    g: MetricGraph, pairs: Iterable[tuple[GraphPoint, float]]
) -> DiscreteMeasure:
    merged: dict[GraphPoint, float] = {}
    for p, w in pairs:
        w = float(w)
        if w < -MASS_TOL:
            raise MeasureValidationError(f"negative weight {w!r}")
        if w <= 0.0:
            continue
        cp = g.canonical(p)
        merged[cp] = merged.get(cp, 0.0) + w
    if not merged:
        raise MeasureValidationError("discrete measure with empty support")
    items = sorted(merged.items(), key=lambda it: it[0].sort_key())
    total = sum(w for _, w in items)
    if abs(total - 1.0) > 1e-9:
        raise MeasureValidationError(f"weights sum to {total!r}, expected 1")
    return DiscreteMeasure(
        points=tuple(p for p, _ in items), weights=tuple(w for _, w in items)
    )


@dataclass(frozen=True)
class TransportPlan:
    """A finitely supported coupling with its transport cost cached.

    ``cost`` is the sum of ``mass * d(x, y) ** 2`` over the entries.
    """

    entries: tuple[tuple[GraphPoint, GraphPoint, float], ...]
    cost: float

    def mass(self) -> float:
        return sum(m for _, _, m in self.entries)

    def source_marginal(self) -> dict[GraphPoint, float]:
        out: dict[GraphPoint, float] = {}
        for x, _, m in self.entries:
            out[x] = out.get(x, 0.0) + m
        return out

    def target_marginal(self) -> dict[GraphPoint, float]:
        out: dict[GraphPoint, float] = {}
        for _, y, m in self.entries:
            out[y] = out.get(y, 0.0) + m
        return out


def _make_plan(g: MetricGraph, entries) -> TransportPlan:
    ordered = tuple(
        sorted(entries, key=lambda e: (e[0].sort_key(), e[1].sort_key()))
    )
    cost = sum(m * distance(g, x, y) ** 2 for x, y, m in ordered)
    return TransportPlan(entries=ordered, cost=cost)


def discretize(g: MetricGraph, m: GraphMeasure, h: float) -> DiscreteMeasure:
    """Replace density pieces by cell-center atoms on a grid of spacing <= h.

    Atoms are kept verbatim; each piece [a, b) is cut into equal cells and its
    mass placed at the cell centers, so mass is conserved and no spurious
    vertex atoms appear.
    """
    if not h > 0.0:
        raise MeasureValidationError(f"grid spacing must be positive, got {h!r}")
    pairs: list[tuple[GraphPoint, float]] = list(m.atoms)
    for eid, a, b, d in m.pieces:
        n = max(1, math.ceil((b - a) / h - 1e-12))
        width = (b - a) / n
        for k in range(n):
            center = a + (k + 0.5) * width
            pairs.append((GraphPoint.on_edge(eid, center), d * width))
    return discrete_measure(g, pairs)


def _marginal_residual(weights: Sequence[float], sums: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(weights) - sums))) if len(weights) else 0.0


def w2_graph(
    g: MetricGraph, m1: DiscreteMeasure, m2: DiscreteMeasure
) -> tuple[float, TransportPlan]:
    """Squared Wasserstein distance and an optimal plan between two supports.

    Solves the transportation linear program
    ``min sum pi(x, y) d(x, y)^2`` over couplings of the two weight vectors
    exactly; the returned cost is the squared distance. The LP solver is
    deterministic for identical inputs, which pins down one optimal plan when
    several exist.

    Raises
    ------
    SolverConsistencyError
        If the solver fails or the plan's marginals drift beyond 1e-10.
    """
    n, k = len(m1.points), len(m2.points)
    cost = np.empty((n, k))
    for i, x in enumerate(m1.points):
        for j, y in enumerate(m2.points):
            cost[i, j] = distance(g, x, y) ** 2

    if n == 1:
        x = m1.points[0]
        entries = [(x, y, w) for y, w in zip(m2.points, m2.weights)]
        plan = _make_plan(g, entries)
        return plan.cost, plan
    if k == 1:
        y = m2.points[0]
        entries = [(x, y, w) for x, w in zip(m1.points, m1.weights)]
        plan = _make_plan(g, entries)
        return plan.cost, plan

    rows = []
    cols = []
    for i in range(n):
        rows.append(np.full(k, i))
        cols.append(np.arange(k) + i * k)
    for j in range(k):
        rows.append(np.full(n, n + j))
        cols.append(np.arange(n) * k + j)
    a_eq = sparse.csr_matrix(
        (np.ones(2 * n * k), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n + k, n * k),
    )
    b_eq = np.concatenate([m1.weights, m2.weights])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise SolverConsistencyError(f"transport LP failed: {res.message}")
    x = res.x.reshape(n, k)
    x[x < 1e-13] = 0.0

    row_res = _marginal_residual(m1.weights, x.sum(axis=1))
    col_res = _marginal_residual(m2.weights, x.sum(axis=0))
    if max(row_res, col_res) > MARGINAL_TOL:
        raise SolverConsistencyError(
            f"plan marginal residual {max(row_res, col_res)!r} exceeds {MARGINAL_TOL}"
        )

    entries = [
        (m1.points[i], m2.points[j], float(x[i, j]))
        for i, j in zip(*np.nonzero(x))
    ]
    plan = _make_plan(g, entries)
    return plan.cost, plan


class BranchTag(Enum):
    """Which way a geodesic leaving a base edge goes: inside it, or out an end."""

    E = "edge"
    PLUS = "plus"
    MINUS = "minus"


def _require_minimizing(g: MetricGraph, oe: OrientedEdge):
    if not is_edge_minimizing(g, oe.edge):
        raise NonMinimizingEdgeError(
            f"edge {oe.edge!r} is not minimizing: endpoint distance is shorter than its length"
        )


def classify_pair(
    g: MetricGraph, oe: OrientedEdge, x: GraphPoint, y: GraphPoint
) -> BranchTag:
    """Classify the geodesic from ``x`` (on the base edge) to ``y``.

    E when the within-edge segment realizes the distance, PLUS when a shortest
    route exits through the oriented second endpoint, MINUS through the first.
    Ties resolve with priority E > PLUS > MINUS, so measures living on the
    edge always classify as E.
    """
    _require_minimizing(g, oe)
    e = g.edge(oe.edge)
    ax = g.oriented_offset(oe, x)
    if ax is None:
        raise ValueError(f"point {x} is not on edge {oe.edge!r}")
    d = distance(g, x, y)
    ay = g.oriented_offset(oe, y)
    if ay is not None and abs(ay - ax) <= d + COST_TOL:
        return BranchTag.E
    e0, e1 = g.oriented_endpoints(oe)
    if (e.length - ax) + distance(g, GraphPoint.at_vertex(e1), y) <= d + COST_TOL:
        return BranchTag.PLUS
    if ax + distance(g, GraphPoint.at_vertex(e0), y) <= d + COST_TOL:
        return BranchTag.MINUS
    raise SolverConsistencyError(
        f"no geodesic class matches pair ({x}, {y}) on edge {oe.edge!r}"
    )


def decompose_plan(
    g: MetricGraph, oe: OrientedEdge, plan: TransportPlan
) -> tuple[TransportPlan, TransportPlan, TransportPlan]:
    """Split a plan whose sources lie on the base edge by geodesic class.

    The three parts sum back to the plan entry by entry; on a minimizing edge
    the PLUS and MINUS parts cannot overlap.
    """
    _require_minimizing(g, oe)
    parts: dict[BranchTag, list] = {t: [] for t in BranchTag}
    for x, y, m in plan.entries:
        if g.oriented_offset(oe, x) is None:
            raise ValueError(
                f"plan has source mass off edge {oe.edge!r} at {x}"
            )
        parts[classify_pair(g, oe, x, y)].append((x, y, m))
    return (
        _make_plan(g, parts[BranchTag.E]),
        _make_plan(g, parts[BranchTag.PLUS]),
        _make_plan(g, parts[BranchTag.MINUS]),
    )


@dataclass(frozen=True)
class RestrictionResult:
    """Output of :func:`restrict`: the split sources, images, and their plans."""

    lam: float
    mu1: DiscreteMeasure
    mu2: DiscreteMeasure
    nu1: DiscreteMeasure
    nu2: DiscreteMeasure
    plan: TransportPlan
    plan1: TransportPlan
    plan2: TransportPlan


def restrict(
    g: MetricGraph,
    m: DiscreteMeasure,
    part1: Mapping[GraphPoint, float],
    nu: DiscreteMeasure,
) -> RestrictionResult:
    """Push a convex split of ``m`` through an optimal plan onto ``nu``.

    ``part1`` is a sub-measure of ``m`` (pointwise between 0 and ``m``); with
    ``lam`` its total mass, ``m = lam * mu1 + (1 - lam) * mu2``. An optimal
    plan from ``m`` to ``nu`` is computed and reweighted by the per-point
    density of each part, giving images ``nu1``, ``nu2`` with
    ``lam * nu1 + (1 - lam) * nu2 = nu`` and plans that are optimal for the
    split problems.
    """
    weights = m.as_dict()
    sub: dict[GraphPoint, float] = {}
    for p, w in part1.items():
        cp = g.canonical(p)
        if cp not in weights:
            raise MeasureValidationError(f"part1 has mass at {cp} outside the measure")
        w = float(w)
        if w < -MASS_TOL or w > weights[cp] + MASS_TOL:
            raise MeasureValidationError(
                f"part1 mass {w!r} at {cp} exceeds the measure's {weights[cp]!r}"
            )
        if w > 0.0:
            sub[cp] = min(w, weights[cp])
    lam = sum(sub.values())
    if lam <= MASS_TOL or lam >= 1.0 - MASS_TOL:
        raise MeasureValidationError(
            f"part1 mass {lam!r} must be strictly between 0 and 1"
        )

    f1 = {p: sub.get(p, 0.0) / weights[p] for p in m.points}
    _, plan = w2_graph(g, m, nu)

    entries1 = []
    entries2 = []
    for x, y, mass in plan.entries:
        w1 = mass * f1[x] / lam
        w2 = mass * (1.0 - f1[x]) / (1.0 - lam)
        if w1 > 0.0:
            entries1.append((x, y, w1))
        if w2 > 0.0:
            entries2.append((x, y, w2))
    plan1 = _make_plan(g, entries1)
    plan2 = _make_plan(g, entries2)

    mu1 = discrete_measure(g, [(p, sub[p] / lam) for p in sub])
    mu2 = discrete_measure(
        g,
        [
            (p, (weights[p] - sub.get(p, 0.0)) / (1.0 - lam))
            for p in m.points
            if weights[p] - sub.get(p, 0.0) > 0.0
        ],
    )
    nu1 = discrete_measure(g, plan1.target_marginal().items())
    nu2 = discrete_measure(g, plan2.target_marginal().items())
    return RestrictionResult(
        lam=lam, mu1=mu1, mu2=mu2, nu1=nu1, nu2=nu2,
        plan=plan, plan1=plan1, plan2=plan2,
    )


def graph_measure_to_json(m: GraphMeasure, digits: int | None = None) -> dict:
    return {
        "atoms": [
            {"point": format_point(p, digits), "mass": mass} for p, mass in m.atoms
        ],
        "pieces": [
            {"edge": eid, "a": a, "b": b, "density": d} for eid, a, b, d in m.pieces
        ],
    }


def graph_measure_from_json(g: MetricGraph, obj: dict) -> GraphMeasure:
    try:
        atoms = [
            (parse_point(g, rec["point"]), rec["mass"]) for rec in obj.get("atoms", [])
        ]
        pieces = [
            (rec["edge"], rec["a"], rec["b"], rec["density"])
            for rec in obj.get("pieces", [])
        ]
    except (KeyError, TypeError) as exc:
        raise MeasureValidationError(f"malformed measure record: {exc}") from None
    return graph_measure(g, atoms=atoms, pieces=pieces)


def discrete_to_graph_measure(m: DiscreteMeasure) -> GraphMeasure:
    return GraphMeasure(atoms=tuple(zip(m.points, m.weights)), pieces=())
