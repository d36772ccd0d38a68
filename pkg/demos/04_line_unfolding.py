"""Unfolding a graph onto the real line around a base edge.

Fix an oriented minimizing edge and a base measure on it. Three 1-Lipschitz
maps send the graph to the line: the edge keeps its offsets, mass reached
through the far endpoint lands beyond the edge length, mass reached through
the near endpoint lands below zero. The induced map on measures expands
transport distances in general and preserves them exactly against the base
measure, even on graphs with cycles.
"""

import math

from mgbary import (
    BranchTag,
    GraphPoint,
    build_graph,
    discrete_measure,
    exceptional_set,
    lift_line_plan,
    make_cover_context,
    phi,
    preimage_count,
    w2_graph,
    w2_line,
)

V = GraphPoint.at_vertex
E = GraphPoint.on_edge

triangle = build_graph(
    {
        "vertices": ["A", "B", "C"],
        "edges": [
            {"id": "e_AB", "u": "A", "v": "B", "length": 1.0},
            {"id": "e_AC", "u": "A", "v": "C", "length": 1.0},
            {"id": "e_BC", "u": "B", "v": "C", "length": 1.0},
        ],
    }
)

base = discrete_measure(triangle, [(E("e_AB", 0.3), 0.5), (E("e_AB", 0.8), 0.5)])
ctx = make_cover_context(triangle, "e_AB", base)

# Unfold a measure spread over the whole triangle.
nu = discrete_measure(
    triangle,
    [(E("e_AB", 0.5), 0.25), (E("e_BC", 0.4), 0.25), (E("e_AC", 0.7), 0.5)],
)
image = phi(ctx, nu)
print("unfolded atoms (position, mass):")
for x, m in image.atoms:
    print(f"  {x:+.3f}  {m}")

# Distance to the base measure is preserved exactly; distances between other
# pairs can only grow.
d_graph = math.sqrt(w2_graph(triangle, base, nu)[0])
d_line = w2_line(phi(ctx, base), image)
print(f"\ngraph distance to base {d_graph:.12f} vs line distance {d_line:.12f}")

# Multiplicity of the far-endpoint map: between exceptional values (images
# of vertices and cut points) the number of preimages is constant. Around
# the triangle: one point at level 1.5, two at 2.25, none beyond the reach.
print("\nexceptional values of the far map:", exceptional_set(ctx, BranchTag.PLUS))
for level in (1.5, 2.25, 3.0):
    print(f"  preimages of {level}: {preimage_count(ctx, BranchTag.PLUS, level)}")

# Lifting a plan on the line back into the graph: mass at a line value is
# spread over its preimages proportionally to the target weights.
tripod = build_graph(
    {
        "vertices": ["o", "t1", "t2", "t3"],
        "edges": [
            {"id": "b1", "u": "o", "v": "t1", "length": 1.0},
            {"id": "b2", "u": "o", "v": "t2", "length": 1.0},
            {"id": "b3", "u": "o", "v": "t3", "length": 1.0},
        ],
    }
)
ctx2 = make_cover_context(
    tripod, "b1", discrete_measure(tripod, [(E("b1", 0.75), 1.0)])
)
targets = discrete_measure(tripod, [(E("b2", 0.6), 0.5), (E("b3", 0.6), 0.5)])
lifted = lift_line_plan(ctx2, BranchTag.MINUS, [(0.75, -0.6, 1.0)], targets)
print("\nlift of the single-pair line plan (source, target, mass):")
for s, p, m in lifted:
    print(f"  {s}  {p}  {m}")
