from __future__ import annotations

import itertools

import pytest

from auvroute.cost_model import CostParams
from auvroute.graph_model import MissionGraph, build_graph

# Priority vector printed alongside the 18-node decoding example.
SAMPLE18_U = [44, -38, 76, -78, 18, 47, 42, 61, 66, -69, -25, -93, 58, -15, 11, -43, 81, 97]


def sample18_graph() -> MissionGraph:
    """18-node graph whose adjacency reproduces the printed decode trace.

    neighbors(1) = {2,3,4,5}; 3 -> 8 -> 13 -> 18 must each be the best
    unvisited neighbour. The rest of the wiring is arbitrary but connected.
    """
    coords = [(1000.0 * ((i % 6) + 1), 150.0 * (i // 6) + 100.0, 20.0 + 3 * i) for i in range(18)]
    pairs = [
        (1, 2), (1, 3), (1, 4), (1, 5),
        (2, 3), (3, 7), (3, 8),
        (6, 8), (8, 13),
        (9, 13), (13, 18),
        (2, 6), (4, 9), (5, 10), (6, 11), (7, 12), (9, 14), (10, 15),
        (11, 16), (12, 17), (14, 18), (16, 17), (17, 18), (15, 18),
    ]
    edges = [(a, b, 2.0 + (a * b) % 7, 1.0 + (a + b) % 5, 60.0) for a, b in pairs]
    return build_graph(coords, edges, start=1, destination=18)


def five_node_graph() -> MissionGraph:
    coords = [(0, 0, 10), (1000, 800, 20), (1200, -900, 30), (2400, 300, 10), (3500, 0, 50)]
    edges = [
        (1, 2, 8.0, 2.0, 120.0),
        (1, 3, 3.0, 4.0, 60.0),
        (2, 3, 6.0, 1.5, 90.0),
        (2, 4, 9.0, 3.0, 200.0),
        (3, 4, 4.0, 2.0, 100.0),
        (3, 5, 2.0, 5.0, 30.0),
        (4, 5, 7.0, 1.0, 150.0),
    ]
    return build_graph(coords, edges)


def triangle_graph() -> MissionGraph:
    coords = [(0, 0, 0), (300, 400, 0), (600, 0, 0)]
    return build_graph(coords, [(1, 2, 4.0, 2.0, 0.0), (2, 3, 4.0, 2.0, 0.0), (1, 3, 2.0, 2.0, 0.0)])


def two_node_graph() -> MissionGraph:
    return build_graph([(0, 0, 0), (1000, 0, 10)], [(1, 2, 5.0, 2.0, 30.0)])


def complete_graph(n: int) -> MissionGraph:
    coords = [(500.0 * i, 300.0 * (i % 2), 10.0) for i in range(n)]
    edges = [(a, b, 1.0 + (a + b) % 4, 1.0 + (a * b) % 3, 10.0) for a, b in itertools.combinations(range(1, n + 1), 2)]
    return build_graph(coords, edges)


@pytest.fixture
def sample18():
    return sample18_graph()


@pytest.fixture
def five():
    return five_node_graph()


@pytest.fixture
def triangle():
    return triangle_graph()


@pytest.fixture
def two_node():
    return two_node_graph()


@pytest.fixture
def five_params():
    # budget admits some, not all, of the five-node routes
    return CostParams(v_auv=2.0, t_available=3000.0)


# acceptance criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
