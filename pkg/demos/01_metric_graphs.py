"""Metric graphs: length distance, geodesics, minimizing edges, cut points.

A metric graph glues intervals at shared vertices; distances are shortest
path lengths through the resulting length space. This walk-through builds a
few small graphs and pokes at the closed-form distance machinery.
"""

from mgbary import (
    GraphPoint,
    build_graph,
    cut_points_from,
    distance,
    is_edge_minimizing,
    path_segment_lengths,
    shortest_path,
)

V = GraphPoint.at_vertex
E = GraphPoint.on_edge

# A triangle with three unit sides.
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
print("triangle: minimum edge length =", triangle.min_edge_length)

# Distance from a vertex to the midpoint of the opposite side: two symmetric
# routes of length 1.5 exist; the tie-break picks the one through e_AB.
mid = E("e_BC", 0.5)
print("d(A, midpoint of BC) =", distance(triangle, V("A"), mid))
path = shortest_path(triangle, V("A"), mid)
print("geodesic steps:", path.steps, "segment lengths:", path_segment_lengths(triangle, path))

# The midpoint of BC is the unique point seen from A through both exits of
# its edge - the cut point of A.
print("cut points from A:", cut_points_from(triangle, "A"))

# Parallel edges of different lengths: the longer one is not a geodesic
# between its own endpoints, and interior shortcuts appear.
parallel = build_graph(
    {
        "vertices": ["P", "Q"],
        "edges": [
            {"id": "short", "u": "P", "v": "Q", "length": 1.0},
            {"id": "long", "u": "P", "v": "Q", "length": 3.0},
        ],
    }
)
print("\nparallel pair: short minimizing:", is_edge_minimizing(parallel, "short"))
print("parallel pair: long minimizing:", is_edge_minimizing(parallel, "long"))
print(
    "d(long:0.1, long:2.9) =",
    distance(parallel, E("long", 0.1), E("long", 2.9)),
    "(crossing through the short edge beats staying on the long one)",
)
print("cut points from P:", cut_points_from(parallel, "P"))

# On a unit square the point opposite a corner is the far corner itself, so
# no edge interior carries a cut point. Stretching one side moves the
# opposite point into an edge interior.
square = build_graph(
    {
        "vertices": ["1", "2", "3", "4"],
        "edges": [
            {"id": "s12", "u": "1", "v": "2", "length": 1.0},
            {"id": "s23", "u": "2", "v": "3", "length": 1.0},
            {"id": "s34", "u": "3", "v": "4", "length": 1.0},
            {"id": "s41", "u": "4", "v": "1", "length": 1.0},
        ],
    }
)
print("\nunit square, cut points from corner 1:", cut_points_from(square, "1"))
