"""Shared fixtures: the small pool of Newton maps used across the suite."""

import pytest

from newtongraph import (
    KIND_INFINITY,
    KIND_PLAIN,
    KIND_POLE,
    KIND_ROOT,
    GraphDynamics,
    Polynomial,
    channel_diagram,
    compute_newton_graph,
    embedded_graph_from_rotations,
    make_newton_map,
)


def aligned_dart_map(edge_map):
    """Dart map for orientation-aligned edge lifts: tail end to tail end."""
    return tuple(2 * edge_map[d >> 1] + (d & 1) for d in range(2 * len(edge_map)))


class HandBuiltModel:
    """A graph-with-dynamics model assembled from plain lists, so tests can
    mutate individual pieces before building."""

    def __init__(self, endpoints, rotations, kinds, vertex_map, edge_map,
                 local_degree, channel, level):
        self._data = (endpoints, rotations, kinds, vertex_map, edge_map,
                      local_degree, channel, level)

    def parts(self):
        endpoints, rotations, kinds, vertex_map, edge_map, degree, channel, level = self._data
        return {
            "endpoints": [tuple(e) for e in endpoints],
            "rotations": [list(r) for r in rotations],
            "kinds": list(kinds),
            "vertex_map": list(vertex_map),
            "edge_map": list(edge_map),
            "local_degree": list(degree),
            "channel": set(channel),
            "level": level,
        }

    @staticmethod
    def assemble(parts):
        graph = embedded_graph_from_rotations(
            parts["endpoints"], parts["rotations"], parts["kinds"])
        return GraphDynamics(
            graph=graph,
            vertex_map=tuple(parts["vertex_map"]),
            edge_map=tuple(parts["edge_map"]),
            dart_map=aligned_dart_map(parts["edge_map"]),
            local_degree=tuple(parts["local_degree"]),
            channel_edges=frozenset(parts["channel"]),
            level=parts["level"],
        )

    def dynamics(self):
        return self.assemble(self.parts())


def _pm_level1_model():
    """Level-1 graph of the Newton map of z^3 - z, built by hand.

    Vertices: 0 root at 0, 1 root at +1, 2 root at -1, 3 infinity,
    4 pole +1/sqrt3, 5 pole -1/sqrt3, 6 point +1/2, 7 point -1/2.
    Edges 0-3 are the fixed rays (up/down from 0, right from +1, left
    from -1); edges 4-11 are their remaining lifts.  Rotation data comes
    from germ directions: at the triple root 0 the new lifts of the up ray
    sit at -30/210 degrees and of the down ray at 30/150 degrees; at the
    simple poles the four germs point at 0/90/180/270 degrees toward the
    lift of the right/down/left/up ray respectively; the segment tails
    +1/2 -> pole+ and -1/2 -> pole- point along the real axis.
    """
    endpoints = [
        (0, 3), (0, 3), (1, 3), (2, 3),   # fixed rays: up, down, right, left
        (0, 4), (0, 5),                   # lifts of up ray at -30 / 210 degrees
        (0, 4), (0, 5),                   # lifts of down ray at 30 / 150 degrees
        (1, 4), (2, 5),                   # in-segment lifts of right / left ray
        (7, 5), (6, 4),                   # far lifts of right / left ray
    ]
    rotations = [
        [12, 0, 14, 10, 2, 8],    # root 0: 30, 90, 150, 210, 270, 330 degrees
        [4, 16],                  # root +1: ray at 0, segment toward pole+ at 180
        [18, 6],                  # root -1: segment toward pole- at 0, ray at 180
        [5, 3, 7, 1],             # infinity, ccw in the 1/z chart
        [17, 13, 23, 9],          # pole+: germs at 0, 90, 180, 270 degrees
        [21, 15, 19, 11],         # pole-: germs at 0, 90, 180, 270 degrees
        [22],                     # +1/2
        [20],                     # -1/2
    ]
    kinds = [KIND_ROOT, KIND_ROOT, KIND_ROOT, KIND_INFINITY,
             KIND_POLE, KIND_POLE, KIND_PLAIN, KIND_PLAIN]
    vertex_map = [0, 1, 2, 3, 3, 3, 2, 1]
    edge_map = [0, 1, 2, 3, 0, 0, 1, 1, 2, 3, 2, 3]
    local_degree = [3, 2, 2, 1, 1, 1, 1, 1]
    return HandBuiltModel(endpoints, rotations, kinds, vertex_map, edge_map,
                          local_degree, {0, 1, 2, 3}, 1)


def _pm_level0_model():
    """Channel diagram of the Newton map of z^3 - z as a bare self-map:
    the two imaginary-axis rays from 0 plus one real ray from each of +1/-1."""
    endpoints = [(0, 3), (0, 3), (1, 3), (2, 3)]
    rotations = [[0, 2], [4], [6], [5, 3, 7, 1]]
    kinds = [KIND_ROOT, KIND_ROOT, KIND_ROOT, KIND_INFINITY]
    return HandBuiltModel(endpoints, rotations, kinds,
                          [0, 1, 2, 3], [0, 1, 2, 3], [3, 2, 2, 1],
                          {0, 1, 2, 3}, 1)


@pytest.fixture(scope="session")
def handbuilt_pm_level1():
    return _pm_level1_model()


@pytest.fixture(scope="session")
def handbuilt_pm_level0():
    return _pm_level0_model()


@pytest.fixture(scope="session")
def cubic_unity():
    # p = z^3 - 1: three simple roots, one double pole at 0 (p' = 3z^2)
    return make_newton_map(Polynomial((-1, 0, 0, 1)))


@pytest.fixture(scope="session")
def cubic_pm():
    # p = z^3 - z: critical set equals root set, 0 has local degree 3
    return make_newton_map(Polynomial((0, -1, 0, 1)))


@pytest.fixture(scope="session")
def cubic_pm_plus():
    # p = z^3 + z: conjugate of z^3 - z under w = iz
    return make_newton_map(Polynomial((0, 1, 0, 1)))


@pytest.fixture(scope="session")
def quartic_unity():
    # p = z^4 - 1: triple pole at 0 of local degree 3
    return make_newton_map(Polynomial((-1, 0, 0, 0, 1)))


@pytest.fixture(scope="session")
def quartic_monic():
    # p = z^4 - z: root 0 has local degree 4
    return make_newton_map(Polynomial((0, -1, 0, 0, 1)))


@pytest.fixture(scope="session")
def delta0_unity(cubic_unity):
    return channel_diagram(cubic_unity)


@pytest.fixture(scope="session")
def delta0_pm(cubic_pm):
    return channel_diagram(cubic_pm)


@pytest.fixture(scope="session")
def delta0_pm_plus(cubic_pm_plus):
    return channel_diagram(cubic_pm_plus)


@pytest.fixture(scope="session")
def delta0_q_unity(quartic_unity):
    return channel_diagram(quartic_unity)


@pytest.fixture(scope="session")
def delta0_q_monic(quartic_monic):
    return channel_diagram(quartic_monic)


@pytest.fixture(scope="session")
def graph_unity(cubic_unity):
    return compute_newton_graph(cubic_unity)


@pytest.fixture(scope="session")
def graph_pm(cubic_pm):
    return compute_newton_graph(cubic_pm)


@pytest.fixture(scope="session")
def graph_pm_plus(cubic_pm_plus):
    return compute_newton_graph(cubic_pm_plus)


@pytest.fixture(scope="session")
def graph_q_unity(quartic_unity):
    return compute_newton_graph(quartic_unity)


@pytest.fixture(scope="session")
def graph_q_monic(quartic_monic):
    return compute_newton_graph(quartic_monic)
