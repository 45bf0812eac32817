"""
Tests for the Coefficient Matrix and Permanent Engine

Context:
- Reference permanents come from hand-checked matrices
- The grouped Ryser engine is compared against the n! oracle with hypothesis
- Column identities are checked on small named graphs
"""

from itertools import product
from math import factorial, prod
from random import Random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.errors import FallbackNeeded, InputError
from src.models import IndexFunction, Provenance, SymbolicColumn
from src.tools.alon_tarsi_tools import expand_polynomial_oracle
from src.tools.graph_tools import (
    build_graph,
    build_wheel,
    degeneracy_ordering,
    find_odd_balloons,
    to_networkx,
)
from src.tools.matrix_tools import (
    assemble,
    balloon_combination,
    build_coefficient_matrix,
    canonical_orientation,
    certificate_from_eta,
    coefficient_from_permanent,
    expand_to_edge_columns,
    path_combination,
    permanent_by_permutations,
    permanent_exact,
    permanent_mod,
)

# Two-son hub block of the bipartite construction: three doubled column pairs and one single column
SEVEN_BY_SEVEN = [
    [-1, -1, 0, 0, 0, 0, -1],
    [0, 0, 1, 1, 0, 0, -1],
    [-1, -1, 0, 0, 1, 1, 0],
    [-1, -1, 0, 0, 1, 1, 0],
    [0, 0, 1, 1, 1, 1, 0],
    [0, 0, 1, 1, 0, 0, -1],
    [0, 0, 0, 0, 1, 1, 1],
]

# Three-son hub block: four doubled column pairs
EIGHT_BY_EIGHT = [
    [-1, -1, 0, 0, 0, 0, -1, -1],
    [0, 0, 0, 0, 1, 1, -1, -1],
    [-1, -1, 1, 1, 0, 0, 0, 0],
    [-1, -1, 1, 1, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 1, 0, 0],
    [0, 0, 0, 0, 1, 1, -1, -1],
    [0, 0, 1, 1, 0, 0, 1, 1],
    [0, 0, 1, 1, 1, 1, 0, 0],
]


def _index_functions(elements, total, cap=None):
    """Every index function over `elements` summing to `total`, entries at most `cap`."""
    top = total if cap is None else cap
    for values in product(range(top + 1), repeat=len(elements)):
        if sum(values) == total:
            yield IndexFunction.from_elements(dict(zip(elements, values)))


def _sampled_index_function(elements, total, rng, cap=2):
    counts = {}
    while sum(counts.values()) < total:
        z = rng.choice([z for z in elements if counts.get(z, 0) < cap])
        counts[z] = counts.get(z, 0) + 1
    return IndexFunction.from_elements(counts)


def _pendant_columns(g, x, base):
    """Degeneracy columns with x last: A(x) kept pure, A(v) +/- A(x) along paths from x."""
    ordering = degeneracy_ordering(g, 2, last=x)
    nxg = to_networkx(g)
    columns = []
    for v, d in zip(ordering.order, ordering.back_degrees):
        if v == x:
            columns.append(SymbolicColumn.pure(x))
        elif d:
            columns.extend([path_combination(nx.shortest_path(nxg, x, v), base)] * d)
    return columns


# ============================================================================
# PERMANENTS
# ============================================================================

@pytest.mark.unit
@pytest.mark.matrix
class TestPermanent:
    """Grouped Ryser evaluation, exact and modular"""

    def test_reference_seven_by_seven(self):
        """
        GIVEN: The 7x7 matrix with three doubled column pairs
        WHEN: Its permanent is evaluated
        THEN: It is -24, matching the n! expansion
        """
        assert permanent_exact(SEVEN_BY_SEVEN) == -24
        assert permanent_by_permutations(SEVEN_BY_SEVEN) == -24

    def test_reference_eight_by_eight(self):
        assert permanent_exact(EIGHT_BY_EIGHT) == -48

    def test_small_chunks_give_the_same_value(self):
        assert permanent_exact(EIGHT_BY_EIGHT, chunk_size=2) == -48

    def test_identity_and_all_ones(self):
        assert permanent_exact(np.eye(5, dtype=int)) == 1
        assert permanent_exact(np.ones((3, 3), dtype=int)) == 6

    def test_zero_row_vanishes(self):
        assert permanent_exact([[0, 0], [1, 1]]) == 0

    def test_non_square_is_rejected(self):
        with pytest.raises(InputError):
            permanent_exact([[1, 2, 3], [4, 5, 6]])

    def test_modular_value(self):
        assert permanent_mod(SEVEN_BY_SEVEN, 3) == 0
        assert permanent_mod(EIGHT_BY_EIGHT, 5) == 2

    def test_modulus_must_be_prime(self):
        with pytest.raises(InputError):
            permanent_mod(SEVEN_BY_SEVEN, 9)

    @hsettings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=5, max_size=5))
    def test_matches_the_permutation_expansion(self, rows):
        expected = permanent_by_permutations(rows)
        assert permanent_exact(rows) == expected
        assert permanent_mod(rows, 7) == expected % 7

    def test_modular_agrees_with_exact_on_random_matrices(self):
        """
        GIVEN: 500 seeded random {-1, 0, 1} matrices of order 2..10
        WHEN: The permanent is taken mod 3, 5 and 7
        THEN: Each residue is the exact permanent reduced mod p
        """
        rng = np.random.default_rng(31337)
        for _ in range(500):
            n = int(rng.integers(2, 11))
            m = rng.integers(-1, 2, size=(n, n))
            exact = permanent_exact(m)
            for p in (3, 5, 7):
                assert permanent_mod(m, p) == exact % p

    def test_linear_in_each_column(self):
        rng = np.random.default_rng(4242)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            m = rng.integers(-2, 3, size=(n, n))
            c1, c2 = rng.integers(-2, 3, size=(2, n))
            a, b = (int(v) for v in rng.integers(-3, 4, size=2))
            j = int(rng.integers(0, n))
            mixed, first, second = m.copy(), m.copy(), m.copy()
            mixed[:, j] = a * c1 + b * c2
            first[:, j] = c1
            second[:, j] = c2
            assert permanent_exact(mixed) == a * permanent_exact(first) + b * permanent_exact(second)


# ============================================================================
# COEFFICIENT MATRIX
# ============================================================================

@pytest.mark.unit
@pytest.mark.matrix
class TestCoefficientMatrix:

    def test_single_edge_rows(self, k2):
        """
        GIVEN: K2 oriented 0 -> 1
        WHEN: A_G is built
        THEN: The head column is +1, the tail -1 and the edge column 0
        """
        base = build_coefficient_matrix(k2)
        assert base.columns == ((0, 1), 0, 1)
        assert base.values.tolist() == [[0, -1, 1]]

    def test_edge_column_is_sum_of_endpoints(self, k4):
        base = build_coefficient_matrix(k4)
        for u, v in k4.edges:
            assert np.array_equal(base.column((u, v)), base.column(u) + base.column(v))

    def test_self_entries_vanish(self, k4):
        base = build_coefficient_matrix(k4)
        for r, e in enumerate(base.rows):
            assert base.values[r, base.column_index[e]] == 0

    def test_orientation_must_cover_the_edges(self, k4, triangle):
        with pytest.raises(InputError):
            build_coefficient_matrix(k4, canonical_orientation(triangle))

    def test_assemble_checks_the_total(self, triangle):
        base = build_coefficient_matrix(triangle)
        with pytest.raises(InputError):
            assemble(base, IndexFunction(vertices={0: 1}))
        with pytest.raises(InputError):
            assemble(base, IndexFunction(vertices={7: 3}))

    def test_weight_matrix_repeats_columns(self, triangle):
        m = assemble(build_coefficient_matrix(triangle), IndexFunction(vertices={0: 2, 1: 1}))
        assert m.is_square
        assert m.column_elements == (0, 0, 1)
        assert m.dense().shape == (3, 3)

    def test_coefficients_match_the_expanded_polynomial(self, triangle):
        """
        GIVEN: The triangle and every index function summing to |E|
        WHEN: per(A_G(eta)) / prod eta! is compared with the expanded product
        THEN: Every coefficient agrees
        """
        base = build_coefficient_matrix(triangle)
        oracle = expand_polynomial_oracle(triangle)
        for eta in _index_functions(base.columns, triangle.edge_count):
            assert coefficient_from_permanent(base, eta) == oracle.coefficient(eta)

    def test_acyclic_out_degrees_give_a_unit_coefficient(self, triangle):
        base = build_coefficient_matrix(triangle)
        assert abs(coefficient_from_permanent(base, IndexFunction(vertices={0: 2, 1: 1}))) == 1

    @pytest.mark.parametrize("edges", [
        [(0, 1), (1, 2), (2, 3)],
        [(0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 2), (2, 3), (0, 3)],
        [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)],
        pytest.param(
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], marks=pytest.mark.slow,
        ),
    ], ids=["path", "claw", "four-cycle", "five-cycle", "k4"])
    def test_capped_coefficients_match_the_expanded_polynomial(self, edges):
        """
        GIVEN: A small graph and every index function with entries at most 2
        WHEN: per(A_G(eta)) / prod eta! is compared with the expanded product
        THEN: Every coefficient agrees
        """
        g = build_graph(edges)
        base = build_coefficient_matrix(g)
        oracle = expand_polynomial_oracle(g)
        for eta in _index_functions(base.columns, g.edge_count, cap=2):
            assert coefficient_from_permanent(base, eta) == oracle.coefficient(eta)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["wheel-4", "eight-cycle"])
    def test_sampled_coefficients_on_eight_edges(self, name):
        if name == "wheel-4":
            g = build_wheel(4).graph
        else:
            g = build_graph([(i, (i + 1) % 8) for i in range(8)])
        base = build_coefficient_matrix(g)
        oracle = expand_polynomial_oracle(g)
        rng = Random(77)
        for _ in range(200):
            eta = _sampled_index_function(base.columns, g.edge_count, rng)
            assert coefficient_from_permanent(base, eta) == oracle.coefficient(eta)

    def test_degeneracy_matrices_have_factorial_permanents(self, two_degenerate_graphs):
        """
        GIVEN: 100 seeded 2-degenerate graphs and their degeneracy orderings
        WHEN: Each vertex column is repeated once per earlier neighbour
        THEN: |per| is the product of the back-degree factorials
        """
        for g in two_degenerate_graphs:
            ordering = degeneracy_ordering(g, 2)
            eta = IndexFunction(vertices=ordering.as_dict())
            per = permanent_exact(assemble(build_coefficient_matrix(g), eta))
            assert abs(per) == prod(factorial(d) for d in ordering.back_degrees)


# ============================================================================
# COLUMN IDENTITIES
# ============================================================================

@pytest.mark.unit
@pytest.mark.matrix
class TestColumnIdentities:

    def test_balloon_gives_twice_the_root(self, wheel5):
        base = build_coefficient_matrix(wheel5.graph)
        balloon = find_odd_balloons(wheel5.graph, 0)[0]
        col = balloon_combination(balloon, base)
        assert col.only_edges
        assert np.array_equal(base.combine(col), 2 * base.column(0))

    def test_balloons_at_the_caterpillar_root(self, odd_caterpillar):
        g = odd_caterpillar.graph
        base = build_coefficient_matrix(g)
        for b in find_odd_balloons(g, 0):
            assert np.array_equal(base.combine(balloon_combination(b, base)), 2 * base.column(0))

    @pytest.mark.parametrize("path,sign", [([0, 1], 1), ([0, 1, 2], -1), ([0, 1, 2, 3], 1)])
    def test_path_alternating_sum(self, k4, path, sign):
        base = build_coefficient_matrix(k4)
        col = path_combination(path, base)
        target = base.column(path[-1]) + sign * base.column(path[0])
        assert np.array_equal(base.combine(col), target)

    def test_path_needs_an_edge(self, k4):
        with pytest.raises(InputError):
            path_combination([2], build_coefficient_matrix(k4))


# ============================================================================
# EXPANSION AND CERTIFICATES
# ============================================================================

@pytest.mark.unit
@pytest.mark.matrix
class TestExpansion:

    def test_balloon_columns_expand_to_edges(self, triangle):
        """
        GIVEN: The triangle with columns 2A(0), 2A(0), 2A(1) from balloons
        WHEN: They are expanded mod 3
        THEN: An edge-only index function with a non-zero permanent survives
        """
        base = build_coefficient_matrix(triangle)
        at0 = balloon_combination(find_odd_balloons(triangle, 0)[0], base)
        at1 = balloon_combination(find_odd_balloons(triangle, 1)[0], base)
        eta = expand_to_edge_columns(base, [at0, at0, at1], p=3)
        assert not eta.vertices
        assert eta.total() == 3
        assert eta.max_edge() <= 2
        assert permanent_exact(assemble(base, eta)) != 0

    def test_expansion_respects_the_cap(self, two_degenerate_graphs):
        """
        GIVEN: 2-degenerate graphs with a pendant vertex x hung on vertex 0
        WHEN: The path columns A(v) +/- A(x) are expanded mod 3 with cap 2
        THEN: Only edge columns and the single x column remain, each edge at
              most twice, and the permanent stays non-zero mod 3
        """
        small = [g for g in two_degenerate_graphs if g.edge_count <= 9][:20]
        assert small
        for g in small:
            x = g.vertex_count
            g_x = build_graph(list(g.edges) + [(0, x)], vertices=range(x + 1))
            base = build_coefficient_matrix(g_x)
            eta = expand_to_edge_columns(base, _pendant_columns(g_x, x, base), p=3, cap=2)
            assert eta.vertices == {x: 1}
            assert set(eta.edges) <= g_x.edge_set
            assert eta.max_edge() <= 2
            assert eta.total() == g_x.edge_count
            assert permanent_mod(assemble(base, eta), 3) != 0

    def test_pure_columns_are_kept(self, triangle):
        base = build_coefficient_matrix(triangle)
        columns = [SymbolicColumn.pure((0, 1)), SymbolicColumn.pure((0, 1)), SymbolicColumn.pure((1, 2))]
        eta = expand_to_edge_columns(base, columns, p=None)
        assert eta.edges == {(0, 1): 2, (1, 2): 1}

    def test_all_ones_on_the_triangle_is_singular(self, triangle):
        base = build_coefficient_matrix(triangle)
        assert permanent_exact(assemble(base, IndexFunction(edges={e: 1 for e in triangle.edges}))) == 0

    def test_vanishing_start_is_rejected(self, triangle):
        base = build_coefficient_matrix(triangle)
        with pytest.raises(InputError):
            expand_to_edge_columns(base, [SymbolicColumn.pure(0)] * 3, p=3)

    def test_column_count_must_match_rows(self, triangle):
        base = build_coefficient_matrix(triangle)
        with pytest.raises(InputError):
            expand_to_edge_columns(base, [SymbolicColumn.pure(0)], p=3)


@pytest.mark.unit
@pytest.mark.matrix
class TestCertificateFromEta:

    def test_vertex_entries_need_fallback(self, triangle):
        with pytest.raises(FallbackNeeded):
            certificate_from_eta(triangle, IndexFunction(vertices={0: 2, 1: 1}), Provenance.SEARCH)

    def test_single_edge_is_singular(self, k2):
        with pytest.raises(FallbackNeeded):
            certificate_from_eta(k2, IndexFunction(edges={(0, 1): 1}), Provenance.SEARCH)

    def test_permanent_is_recorded(self, triangle):
        eta = IndexFunction(edges={(0, 1): 2, (1, 2): 1})
        c = certificate_from_eta(triangle, eta, Provenance.SEARCH, {"note": "manual"})
        assert c.permanent == 2
        assert c.aux == {"note": "manual"}
