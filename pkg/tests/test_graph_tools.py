"""
Tests for Graph, Plane Tree and Halin Construction

This module covers the graph-core operations: graph and Halin construction,
bipartition, degeneracy orderings, odd balloons and the tree generators.

Context:
- Named small instances come from conftest fixtures
- Generator properties are checked with hypothesis and seeded loops
"""

from itertools import combinations, product
from random import Random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.errors import InputError
from src.models import Balloon, Graph, HalinGraph, HalinKind, PlaneTree
from src.tools.graph_tools import (
    bipartition,
    build_graph,
    build_halin,
    build_wheel,
    degeneracy_ordering,
    enumerate_plane_trees,
    find_odd_balloons,
    ordering_from_sequence,
    random_plane_tree,
    star_tree,
)


# ============================================================================
# GRAPHS
# ============================================================================

@pytest.mark.unit
@pytest.mark.graph
class TestBuildGraph:
    """Graph construction and incidence"""

    def test_edges_are_canonical_and_deduplicated(self):
        """
        GIVEN: Pairs in both directions, one repeated
        WHEN: The graph is built
        THEN: Each edge appears once as (smaller, larger)
        """
        g = build_graph([(2, 1), (1, 2), (3, 2)])
        assert g.edges == ((1, 2), (2, 3))
        assert g.vertices == (1, 2, 3)

    def test_loop_is_rejected(self):
        with pytest.raises(InputError):
            build_graph([(1, 1)])

    def test_incidence_lists_each_edge_twice(self, k4):
        listed = [e for es in k4.incidence.values() for e in es]
        assert len(listed) == 2 * k4.edge_count
        assert all(k4.degree(v) == 3 for v in k4.vertices)

    def test_isolated_vertices_are_kept(self):
        g = build_graph([(0, 1)], vertices=[5])
        assert g.vertices == (0, 1, 5)
        assert g.degree(5) == 0

    def test_without_vertex_drops_incident_edges(self, k4):
        g = k4.without_vertex(0)
        assert g.vertices == (1, 2, 3)
        assert g.edge_count == 3


# ============================================================================
# HALIN GRAPHS
# ============================================================================

@pytest.mark.unit
@pytest.mark.graph
class TestHalinConstruction:
    """Trees plus leaf cycles"""

    def test_wheel_has_rim_cycle(self, wheel7):
        """
        GIVEN: The star K_{1,7}
        WHEN: Its leaves are joined cyclically
        THEN: The result is W_7 with 14 edges and the rim in order
        """
        assert wheel7.cycle == (1, 2, 3, 4, 5, 6, 7)
        assert wheel7.graph.edge_count == 14
        assert wheel7.is_wheel
        assert wheel7.graph.has_edge(7, 1)

    def test_cycle_follows_plane_order(self, even_caterpillar):
        assert even_caterpillar.cycle == (1, 4, 5, 3)
        assert set(even_caterpillar.cycle_edges) == {(1, 4), (4, 5), (3, 5), (1, 3)}

    def test_three_leaves_minimum(self):
        with pytest.raises(InputError):
            build_halin(PlaneTree(root=0, children={0: [1, 2]}))

    def test_star_needs_three_leaves(self):
        with pytest.raises(InputError):
            star_tree(2)

    def test_strict_kind_rejects_degree_two(self):
        tree = PlaneTree(root=0, children={0: [1, 2, 3, 4], 2: [5], 4: [6]})
        with pytest.raises(InputError):
            build_halin(tree, HalinKind.STRICT)
        assert build_halin(tree, HalinKind.GENERALIZED).graph.edge_count == 10

    def test_document_restores_the_graph(self, odd_caterpillar):
        restored = HalinGraph.from_document(odd_caterpillar.to_document())
        assert restored.graph.edges == odd_caterpillar.graph.edges
        assert restored.cycle == odd_caterpillar.cycle

    def test_document_with_wrong_edges_is_rejected(self, wheel5):
        doc = wheel5.to_document()
        doc["edges"] = doc["edges"][:-1]
        with pytest.raises(ValueError):
            HalinGraph.from_document(doc)

    def test_reroot_keeps_the_leaf_cycle(self, odd_caterpillar):
        rerooted = odd_caterpillar.tree.reroot(2)
        leaves = rerooted.leaves
        cycle = odd_caterpillar.cycle
        i = cycle.index(leaves[0])
        rotated = cycle[i:] + cycle[:i]
        assert leaves in (rotated, (rotated[0],) + tuple(reversed(rotated[1:])))


# ============================================================================
# STRUCTURAL QUERIES
# ============================================================================

@pytest.mark.unit
@pytest.mark.graph
class TestBipartition:

    def test_even_cycle_is_bipartite(self):
        g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
        coloring = bipartition(g)
        assert coloring.is_bipartite
        assert all(coloring.colors[u] != coloring.colors[v] for u, v in g.edges)

    def test_bipartite_halin(self, bipartite_halin):
        assert bipartition(bipartite_halin.graph).is_bipartite

    def test_odd_cycle_witness(self, wheel6):
        """
        GIVEN: A wheel (it contains triangles)
        WHEN: It is two-coloured
        THEN: An odd cycle of existing edges is returned
        """
        coloring = bipartition(wheel6.graph)
        cycle = coloring.odd_cycle
        assert not coloring.is_bipartite
        assert len(cycle) % 2 == 1
        for i in range(len(cycle)):
            assert wheel6.graph.has_edge(cycle[i], cycle[(i + 1) % len(cycle)])

    def test_disconnected_graph_is_rejected(self):
        with pytest.raises(InputError):
            bipartition(build_graph([(0, 1), (2, 3)]))

    def test_agrees_with_exhaustive_two_colouring(self):
        """
        GIVEN: 200 seeded connected graphs on at most 8 vertices
        WHEN: They are two-coloured
        THEN: The verdict matches a search over all 2^n colourings, and every
              witness is an odd cycle of distinct vertices along graph edges
        """
        rng = Random(1701)
        for _ in range(200):
            n = rng.randint(2, 8)
            edges = [(rng.randrange(i), i) for i in range(1, n)]
            pairs = list(combinations(range(n), 2))
            edges += rng.sample(pairs, rng.randint(0, min(4, len(pairs))))
            g = build_graph(edges)
            exhaustive = any(
                all(colors[u] != colors[v] for u, v in g.edges)
                for colors in product((0, 1), repeat=n)
            )
            coloring = bipartition(g)
            assert coloring.is_bipartite == exhaustive
            if not exhaustive:
                cycle = coloring.odd_cycle
                assert len(cycle) % 2 == 1
                assert len(set(cycle)) == len(cycle)
                for i in range(len(cycle)):
                    assert g.has_edge(cycle[i], cycle[(i + 1) % len(cycle)])


@pytest.mark.unit
@pytest.mark.graph
class TestDegeneracy:

    def test_halin_graphs_are_two_degenerate_minus_a_vertex(self, wheel7):
        g = wheel7.graph.without_vertex(7)
        ordering = degeneracy_ordering(g, 2)
        assert max(ordering.back_degrees) <= 2
        assert sum(ordering.back_degrees) == g.edge_count

    def test_last_vertex_is_honoured(self, k4):
        ordering = degeneracy_ordering(k4, 3, last=2)
        assert ordering.order[-1] == 2

    def test_bound_too_small(self, k4):
        with pytest.raises(InputError):
            degeneracy_ordering(k4, 2)

    def test_explicit_sequence(self, wheel7):
        g = wheel7.graph.without_vertex(7)
        ordering = ordering_from_sequence(g, [1, 0, 2, 3, 4, 5, 6], 2)
        assert ordering.as_dict() == {1: 0, 0: 1, 2: 2, 3: 2, 4: 2, 5: 2, 6: 2}

    def test_explicit_sequence_over_bound(self, k4):
        with pytest.raises(InputError):
            ordering_from_sequence(k4, [0, 1, 2, 3], 2)


@pytest.mark.unit
@pytest.mark.graph
class TestHalinInvariants:
    """Structure of Halin graphs closed over seeded random trees"""

    @pytest.mark.parametrize("degree2", [False, True], ids=["strict", "generalized"])
    def test_random_halin_graphs(self, degree2):
        """
        GIVEN: 100 seeded random plane trees with 3..10 leaves
        WHEN: The leaf cycle is closed
        THEN: |E| = |E(T)| + #leaves, every leaf has degree 3, and deleting
              any single vertex leaves a 2-degenerate graph
        """
        kind = HalinKind.GENERALIZED if degree2 else HalinKind.STRICT
        rng = Random(271828)
        for seed in range(100):
            tree = random_plane_tree(rng.randint(3, 10), allow_degree2=degree2, seed=seed)
            g = build_halin(tree, kind).graph
            assert g.edge_count == (len(tree.vertices) - 1) + len(tree.leaves)
            assert all(g.degree(leaf) == 3 for leaf in tree.leaves)
            for v in g.vertices:
                smaller = g.without_vertex(v)
                ordering = degeneracy_ordering(smaller, 2)
                assert sum(ordering.back_degrees) == smaller.edge_count


@pytest.mark.unit
@pytest.mark.graph
class TestOddBalloons:

    def test_balloon_at_wheel_centre(self, wheel5):
        balloons = find_odd_balloons(wheel5.graph, 0)
        assert len(balloons) == 1
        b = balloons[0]
        assert b.root == 0
        assert b.odd
        assert all(wheel5.graph.has_edge(*e) for e in b.edges)

    def test_balloons_are_edge_disjoint(self, wheel7):
        balloons = find_odd_balloons(wheel7.graph, 0, count=3)
        assert len(balloons) == 3
        seen = set()
        for b in balloons:
            assert not seen & set(b.edges)
            seen |= set(b.edges)

    def test_forbidden_edges_are_avoided(self, wheel7):
        forbidden = [(0, 1), (1, 2)]
        for b in find_odd_balloons(wheel7.graph, 1, forbidden_edges=forbidden):
            assert not set(b.edges) & set(forbidden)

    def test_bipartite_graph_has_none(self, bipartite_halin):
        assert find_odd_balloons(bipartite_halin.graph, 0) == []

    def test_balloon_shape_is_validated(self):
        with pytest.raises(ValueError):
            Balloon(path_vertices=(0, 1), cycle_vertices=(2, 3, 4))


# ============================================================================
# GENERATORS
# ============================================================================

@pytest.mark.unit
@pytest.mark.graph
class TestGenerators:

    @hsettings(max_examples=40, deadline=None)
    @given(leaves=st.integers(min_value=3, max_value=12), seed=st.integers(0, 10_000), degree2=st.booleans())
    def test_random_tree_has_requested_leaves(self, leaves, seed, degree2):
        tree = random_plane_tree(leaves, allow_degree2=degree2, seed=seed)
        assert len(tree.leaves) == leaves
        assert tree.preorder == tuple(range(len(tree.vertices)))
        kind = HalinKind.GENERALIZED if degree2 else HalinKind.STRICT
        assert build_halin(tree, kind).graph.edge_count == len(tree.vertices) - 1 + leaves

    def test_random_tree_is_reproducible(self):
        first = random_plane_tree(9, True, seed=4)
        again = random_plane_tree(9, True, seed=4)
        assert first.children == again.children

    def test_random_tree_rejects_two_leaves(self):
        with pytest.raises(InputError):
            random_plane_tree(2)

    def test_enumeration_counts(self):
        """
        GIVEN: Plane trees with 4 and 5 vertices
        WHEN: Halin skeletons are enumerated
        THEN: Four vertices give only the star, five give six trees, one strict
        """
        assert len(list(enumerate_plane_trees(4))) == 1
        assert len(list(enumerate_plane_trees(5))) == 6
        assert len(list(enumerate_plane_trees(5, allow_degree2=False))) == 1

    def test_enumerated_trees_are_distinct_halin_skeletons(self):
        trees = list(enumerate_plane_trees(7))
        shapes = {tuple(sorted(t.children.items())) for t in trees}
        assert len(shapes) == len(trees)
        for tree in trees:
            assert isinstance(build_halin(tree).graph, Graph)

    def test_wheel_builder(self):
        assert build_wheel(4).graph.edge_count == 8
