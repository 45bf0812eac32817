"""
PyTest Configuration and Fixtures for the Halin Weight Certifier Tests

This module provides test fixtures for:
- Small named graphs (K2, P3, triangle, K4) and Halin instances (wheels, caterpillars)
- Seeded faker generators for list assignments
- Artifact stores rooted in a temporary directory
- A shared context dictionary for BDD steps

Context:
- Every fixture is deterministic: faker and the random generators are seeded
- Heavy instances are built once per session
"""

from itertools import combinations
from random import Random
from typing import Any, Dict, List

import pytest
from faker import Faker

from src.models import Graph, HalinGraph, HalinKind, ListAssignment, Orientation, PlaneTree
from src.storage import ArtifactStore
from src.tools.graph_tools import build_graph, build_halin, build_wheel

fake = Faker()
Faker.seed(20240607)


# ============================================================================
# PYTEST-BDD CONFIGURATION
# ============================================================================

def pytest_bdd_step_error(
    request, feature, scenario, step, step_func, step_func_args, exception
):
    """Enhanced error reporting for BDD steps"""
    print(f"\nBDD Step Failed: {step.name}")
    print(f"   Feature: {feature.name}")
    print(f"   Scenario: {scenario.name}")
    print(f"   Exception: {exception}")


@pytest.fixture
def context() -> Dict[str, Any]:
    """Scratch space shared by the Given/When/Then steps of one scenario"""
    return {}


# ============================================================================
# SMALL GRAPHS
# ============================================================================

@pytest.fixture
def k2() -> Graph:
    return build_graph([(0, 1)])


@pytest.fixture
def p3() -> Graph:
    return build_graph([(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> Graph:
    return build_graph([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4() -> Graph:
    return build_graph([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


# ============================================================================
# HALIN INSTANCES
# ============================================================================

@pytest.fixture(scope="session")
def wheel5() -> HalinGraph:
    return build_wheel(5)


@pytest.fixture(scope="session")
def wheel6() -> HalinGraph:
    return build_wheel(6)


@pytest.fixture(scope="session")
def wheel7() -> HalinGraph:
    return build_wheel(7)


@pytest.fixture(scope="session")
def even_caterpillar() -> HalinGraph:
    """
    Root 0 with sons 1, 2, 3, where 2 carries leaves 4, 5.

    Leaves 1, 4, 5, 3 give an even cycle; the graph has triangles.
    """
    return build_halin(PlaneTree(root=0, children={0: [1, 2, 3], 2: [4, 5]}), HalinKind.STRICT)


@pytest.fixture(scope="session")
def odd_caterpillar() -> HalinGraph:
    """Root 0 with sons 1, 2, 3, where 2 carries leaves 4, 5, 6 (five leaves)."""
    return build_halin(PlaneTree(root=0, children={0: [1, 2, 3], 2: [4, 5, 6]}), HalinKind.STRICT)


@pytest.fixture(scope="session")
def bipartite_halin() -> HalinGraph:
    """
    Root 0 with sons 1, 2, 3, 4, where 2 and 4 each lead to one leaf.

    Leaf depths alternate 1, 2, 1, 2 around the cycle 1, 5, 3, 6, so the
    graph is bipartite.
    """
    return build_halin(PlaneTree(root=0, children={0: [1, 2, 3, 4], 2: [5], 4: [6]}))


@pytest.fixture(scope="session")
def chain_halin() -> HalinGraph:
    """
    Root 0 with sons 1, 2, 3, 4; 2 leads down the chain 5, 6 to the leaf 7
    and 4 carries the leaf 8.

    Leaf depths 1, 4, 1, 2 alternate in parity, so the graph is bipartite.
    """
    return build_halin(PlaneTree(root=0, children={0: [1, 2, 3, 4], 2: [5], 5: [6], 6: [7], 4: [8]}))


# ============================================================================
# SEEDED RANDOM GRAPHS
# ============================================================================

@pytest.fixture(scope="session")
def two_degenerate_graphs() -> List[Graph]:
    """
    100 connected 2-degenerate graphs on 3..10 vertices.

    Vertex i >= 1 is joined to one or two earlier vertices, so the id order
    has back-degrees at most 2.
    """
    rng = Random(5150)
    graphs: List[Graph] = []
    for _ in range(100):
        n = rng.randint(3, 10)
        edges = []
        for i in range(1, n):
            for j in rng.sample(range(i), min(i, rng.choice((1, 2)))):
                edges.append((j, i))
        graphs.append(build_graph(edges, vertices=range(n)))
    return graphs


@pytest.fixture(scope="session")
def random_orientations() -> List[Orientation]:
    """100 orientations of random simple graphs with 1..12 edges."""
    rng = Random(8086)
    orientations: List[Orientation] = []
    for _ in range(100):
        pairs = list(combinations(range(rng.randint(3, 7)), 2))
        chosen = rng.sample(pairs, rng.randint(1, min(12, len(pairs))))
        arcs = tuple(e if rng.random() < 0.5 else (e[1], e[0]) for e in chosen)
        orientations.append(Orientation(arcs=arcs))
    return orientations


# ============================================================================
# FAKER-BACKED DATA
# ============================================================================

def fake_lists(g: Graph, k: int, k_prime: int, window: int) -> ListAssignment:
    """(k,k')-lists of distinct integers in [-window, window] drawn by faker."""
    pool: List[int] = list(range(-window, window + 1))
    return ListAssignment(
        vertices={v: fake.random_sample(pool, length=k) for v in g.vertices},
        edges={e: fake.random_sample(pool, length=k_prime) for e in g.edges},
    )


@pytest.fixture
def list_factory():
    """Factory for faker-generated (k,k')-list assignments"""
    return fake_lists


@pytest.fixture
def store(tmp_path) -> ArtifactStore:
    return ArtifactStore(tmp_path)
