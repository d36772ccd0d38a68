import pytest
from hypothesis import HealthCheck, settings

from mgbary import GraphPoint, build_graph, graph_measure

settings.register_profile(
    "ci",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def make_triangle():
    return build_graph(
        {
            "vertices": ["A", "B", "C"],
            "edges": [
                {"id": "e_AB", "u": "A", "v": "B", "length": 1.0},
                {"id": "e_AC", "u": "A", "v": "C", "length": 1.0},
                {"id": "e_BC", "u": "B", "v": "C", "length": 1.0},
            ],
        }
    )


def make_tripod():
    return build_graph(
        {
            "vertices": ["o", "t1", "t2", "t3"],
            "edges": [
                {"id": "b1", "u": "o", "v": "t1", "length": 1.0},
                {"id": "b2", "u": "o", "v": "t2", "length": 1.0},
                {"id": "b3", "u": "o", "v": "t3", "length": 1.0},
            ],
        }
    )


def make_square():
    return build_graph(
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


def make_skewed_square():
    # 4-cycle of perimeter 5; the point opposite a corner falls mid-edge
    return build_graph(
        {
            "vertices": ["A", "B", "C", "D"],
            "edges": [
                {"id": "k_AB", "u": "A", "v": "B", "length": 1.0},
                {"id": "k_BC", "u": "B", "v": "C", "length": 1.0},
                {"id": "k_CD", "u": "C", "v": "D", "length": 1.0},
                {"id": "k_DA", "u": "D", "v": "A", "length": 2.0},
            ],
        }
    )


def make_square_with_chord():
    return build_graph(
        {
            "vertices": ["1", "2", "3", "4"],
            "edges": [
                {"id": "q12", "u": "1", "v": "2", "length": 1.0},
                {"id": "q23", "u": "2", "v": "3", "length": 1.0},
                {"id": "q34", "u": "3", "v": "4", "length": 1.0},
                {"id": "q41", "u": "4", "v": "1", "length": 1.0},
                {"id": "q13", "u": "1", "v": "3", "length": 1.2},
            ],
        }
    )


def make_segment(length=1.0, eid="seg"):
    return build_graph(
        {
            "vertices": ["L", "R"],
            "edges": [{"id": eid, "u": "L", "v": "R", "length": length}],
        }
    )


def make_parallel(l1=1.0, l2=3.0):
    return build_graph(
        {
            "vertices": ["P", "Q"],
            "edges": [
                {"id": "pshort", "u": "P", "v": "Q", "length": l1},
                {"id": "plong", "u": "P", "v": "Q", "length": l2},
            ],
        }
    )


def tripod_outer_halves(g, weights=(1 / 3, 1 / 3, 1 / 3)):
    """Inputs of the tripod benchmark: density 2 on the outer half of each leg."""
    return [
        (w, graph_measure(g, pieces=[(f"b{i}", 0.5, 1.0, 2.0)]))
        for i, w in zip((1, 2, 3), weights)
    ]


def random_point(g, rng):
    edges = g.edges
    if rng.random() < 0.25:
        return GraphPoint.at_vertex(rng.choice(list(g.vertices)))
    e = edges[rng.randrange(len(edges))]
    return GraphPoint.on_edge(e.id, rng.uniform(0.0, e.length))


@pytest.fixture
def triangle():
    return make_triangle()


@pytest.fixture
def tripod():
    return make_tripod()


@pytest.fixture
def square():
    return make_square()


@pytest.fixture
def square_with_chord():
    return make_square_with_chord()
