"""
Halin Weight Certifier - Weight Tools

CONTEXT:
This module turns certificates into proper total weightings:
- is_proper: every edge uv has different weighted sums at u and v
- solve: search the grid of eta(z)+1 smallest values per element, which the
  Combinatorial Nullstellensatz guarantees to contain a proper weighting
- brute_force_choosable: finite (k,k')-list family check on tiny graphs
- evaluate_polynomial: P_G at a total weighting
- random_list_assignment: seeded integer (k,k')-list assignments

The sum at v is phi(v) plus the weights of the edges at v. Weights are exact
fractions throughout.

DEPENDENCIES:
- src.tools.certifier_tools: verify_certificate precondition of solve

USAGE:
    from src.tools.weight_tools import solve

    lists = ListAssignment.uniform(g, [0], [1, 2, 3])
    weighting = solve(g, certificate, lists)
"""

import itertools
import logging
import random
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.config import settings
from src.errors import ConsistencyError, InputError, ScaleGuardError
from src.models import (
    Certificate,
    ChoosabilityReport,
    Edge,
    Element,
    Graph,
    ListAssignment,
    Orientation,
    ProperCheck,
    TotalWeighting,
)
from src.tools.certifier_tools import verify_certificate
from src.tools.matrix_tools import canonical_orientation

logger = logging.getLogger(__name__)


# ============================================================================
# PROPERNESS
# ============================================================================

def vertex_sums(g: Graph, w: TotalWeighting) -> Dict[int, Fraction]:
    """phi(v) + sum of phi(e) over edges at v."""
    missing = [z for z in g.elements() if w.get(z) is None]
    if missing:
        logger.error(f"Total weighting misses {len(missing)} elements, first {missing[0]}")
        raise InputError(f"no weight for element {missing[0]}")
    return {v: w[v] + sum((w[e] for e in g.incidence[v]), Fraction(0)) for v in g.vertices}


def is_proper(g: Graph, w: TotalWeighting) -> ProperCheck:
    """
    Check that adjacent vertices get different sums.

    Example:
        >>> is_proper(k2, TotalWeighting.from_elements({0: 1, 1: 1, (0, 1): 1})).violating_edge
        (0, 1)
    """
    sums = vertex_sums(g, w)
    for u, v in g.edges:
        if sums[u] == sums[v]:
            return ProperCheck(proper=False, violating_edge=(u, v))
    return ProperCheck(proper=True)


def evaluate_polynomial(g: Graph, w: TotalWeighting, d: Optional[Orientation] = None) -> Fraction:
    """P_G at w: product over arcs a -> b of (sum at b - sum at a)."""
    d = d or canonical_orientation(g)
    sums = vertex_sums(g, w)
    value = Fraction(1)
    for tail, head in d.arcs:
        value *= sums[head] - sums[tail]
    return value


# ============================================================================
# SOLVER
# ============================================================================

def _grid(g: Graph, c: Certificate, lists: ListAssignment) -> Dict[Element, Tuple[Fraction, ...]]:
    grid: Dict[Element, Tuple[Fraction, ...]] = {}
    for z in g.elements():
        need = c.eta[z] + 1
        available = lists[z]
        if len(available) < need:
            logger.error(f"List at {z} has {len(available)} values, certificate needs {need}")
            raise InputError(f"list at {z} is too small: {len(available)} < {need}")
        grid[z] = available[:need]
    return grid


def solve(g: Graph, c: Certificate, lists: ListAssignment) -> TotalWeighting:
    """
    Proper L-total weighting drawn from the certificate's grid.

    Elements with eta(z) = 0 take their smallest permissible value and the
    edges are assigned in canonical order. An edge is checked as soon as
    every edge at both of its ends has a value.

    Raises:
        InputError: Lists do not cover g, are too small, or c does not verify
        ConsistencyError: The grid holds no proper weighting
    """
    if not lists.covers(g):
        raise InputError("list assignment does not cover every vertex and edge")
    report = verify_certificate(g, c)
    if not report.ok:
        logger.error(f"solve: certificate rejected ({report.reason})")
        raise InputError(f"certificate does not verify: {report.reason}")

    grid = _grid(g, c, lists)
    edges = list(g.edges)
    sums: Dict[int, Fraction] = {v: grid[v][0] for v in g.vertices}
    open_edges: Dict[int, int] = {v: g.degree(v) for v in g.vertices}
    chosen: Dict[Edge, Fraction] = {}
    steps = [0]

    def clashes(v: int) -> bool:
        return any(open_edges[u] == 0 and sums[u] == sums[v] for u in g.neighbours[v])

    def place(i: int) -> bool:
        if i == len(edges):
            return True
        u, v = edges[i]
        for x in grid[(u, v)]:
            steps[0] += 1
            chosen[(u, v)] = x
            sums[u] += x
            sums[v] += x
            open_edges[u] -= 1
            open_edges[v] -= 1
            ok = not (open_edges[u] == 0 and clashes(u)) and not (open_edges[v] == 0 and clashes(v))
            if ok and place(i + 1):
                return True
            sums[u] -= x
            sums[v] -= x
            open_edges[u] += 1
            open_edges[v] += 1
        del chosen[(u, v)]
        return False

    if not place(0):
        logger.error(f"Grid exhausted after {steps[0]} steps despite a verified certificate")
        raise ConsistencyError("no proper weighting in the certificate grid")

    weighting = TotalWeighting(vertices={v: grid[v][0] for v in g.vertices}, edges=chosen)
    check = is_proper(g, weighting)
    if not check.proper:
        raise ConsistencyError(f"solver output is not proper at {check.violating_edge}")
    logger.info(f"Proper weighting found after {steps[0]} steps")
    return weighting


# ============================================================================
# BRUTE FORCE
# ============================================================================

def _weightable(g: Graph, vertex_lists: Tuple[Tuple[int, ...], ...], edge_lists: Tuple[Tuple[int, ...], ...]) -> bool:
    """True when some choice from the lists is proper."""
    index = {v: i for i, v in enumerate(g.vertices)}
    ends = [(index[u], index[v]) for u, v in g.edges]
    for base in itertools.product(*vertex_lists):
        for weights in itertools.product(*edge_lists):
            sums = list(base)
            for (a, b), x in zip(ends, weights):
                sums[a] += x
                sums[b] += x
            if all(sums[a] != sums[b] for a, b in ends):
                return True
    return False


def brute_force_choosable(g: Graph, k: int, k_prime: int, window: int) -> ChoosabilityReport:
    """
    Try every (k,k')-list assignment with integer lists from [-window, window].

    Passing only means the finite family is weightable; it never proves
    (k,k')-choosability.

    Raises:
        ScaleGuardError: If |V| + |E| exceeds settings.brute_force_element_limit
        InputError: If the window holds fewer than max(k, k') integers
    """
    size = g.vertex_count + g.edge_count
    limit = settings.brute_force_element_limit
    if size > limit:
        logger.error(f"Brute force refused: {size} elements > {limit}")
        raise ScaleGuardError("brute-force choosability", size, limit)
    if max(k, k_prime) > 2 * window + 1 or min(k, k_prime) < 1:
        raise InputError(f"cannot draw ({k},{k_prime}) lists from [-{window}, {window}]")

    pool = range(-window, window + 1)
    vertex_options = list(itertools.combinations(pool, k))
    edge_options = list(itertools.combinations(pool, k_prime))
    checked = 0
    for vls in itertools.product(vertex_options, repeat=g.vertex_count):
        for els in itertools.product(edge_options, repeat=g.edge_count):
            checked += 1
            if _weightable(g, vls, els):
                continue
            lists = ListAssignment(vertices=dict(zip(g.vertices, vls)), edges=dict(zip(g.edges, els)))
            logger.info(f"({k},{k_prime}) counterexample after {checked} assignments")
            return ChoosabilityReport(passed=False, checked=checked, counterexample=lists)
    logger.info(f"All {checked} ({k},{k_prime}) assignments are weightable")
    return ChoosabilityReport(passed=True, checked=checked)


def random_list_assignment(g: Graph, k: int, k_prime: int, window: int, seed: int = 0) -> ListAssignment:
    """Seeded (k,k')-list assignment with distinct integers from [-window, window]."""
    pool: List[int] = list(range(-window, window + 1))
    if max(k, k_prime) > len(pool):
        raise InputError(f"window {window} holds fewer than {max(k, k_prime)} integers")
    rng = random.Random(seed)
    return ListAssignment(
        vertices={v: rng.sample(pool, k) for v in g.vertices},
        edges={e: rng.sample(pool, k_prime) for e in g.edges},
    )
