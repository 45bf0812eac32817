"""
Halin Weight Certifier - Alon-Tarsi Tools

CONTEXT:
This module counts Eulerian sub-digraphs and expands the graph polynomial:
- count_eulerian: |EE(D)| and |EO(D)|, optionally restricted to sub-digraphs
  through one arc
- alon_tarsi_coefficient: |EE(D)| - |EO(D)| (sign left undetermined)
- out_degree_index: the index function eta(v) = out-degree of v
- expand_polynomial_oracle: brute-force expansion of P_G (or Q_G with all
  edge variables set to 0) as an independent oracle for permanent identities

EULERIAN COUNTING:
Arcs are scanned in a fixed order with a frontier of open vertices. A DP
state keeps the out-minus-in balance of every open vertex that has a
non-zero balance plus the parity of the chosen arc count; a vertex closes
after its last arc and only balanced states survive.

DEPENDENCIES:
- sympy: Sparse polynomial ring over ZZ for the expansion oracle
- src.tools.matrix_tools: Rows of A_G as the linear factors of P_G

USAGE:
    from src.tools.alon_tarsi_tools import count_eulerian

    counts = count_eulerian(orientation)
    print(counts.even_count, counts.odd_count)
"""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from sympy import ZZ
from sympy.polys.rings import ring

from src.config import settings
from src.errors import InputError, ScaleGuardError
from src.models import (
    Edge,
    EulerianCount,
    Graph,
    IndexFunction,
    Orientation,
    PolynomialOracleResult,
    canonical_edge,
)
from src.tools.matrix_tools import build_coefficient_matrix

logger = logging.getLogger(__name__)

State = Tuple[Tuple[Tuple[int, int], ...], int]


def count_eulerian(d: Orientation, through: Optional[Edge] = None) -> EulerianCount:
    """
    Count even and odd Eulerian sub-digraphs of D.

    Args:
        d: Orientation (the digraph D)
        through: If given, count only sub-digraphs containing this arc

    Returns:
        EulerianCount; the empty sub-digraph is counted as even unless `through` excludes it

    Example:
        >>> count_eulerian(directed_cycle(4)).difference
        2
    """
    arcs = sorted(d.arcs, key=lambda a: canonical_edge(*a))
    if through is not None:
        through = canonical_edge(*through)
        if through not in d.heads:
            raise InputError(f"arc {through} is not in the orientation")

    remaining: Dict[int, int] = defaultdict(int)
    for t, h in arcs:
        remaining[t] += 1
        remaining[h] += 1

    states: Dict[State, int] = {((), 0): 1}
    for t, h in arcs:
        forced = through is not None and canonical_edge(t, h) == through
        remaining[t] -= 1
        remaining[h] -= 1
        closing = [v for v in (t, h) if remaining[v] == 0]
        nxt: Dict[State, int] = defaultdict(int)
        for (balance, parity), ways in states.items():
            options = (True,) if forced else (False, True)
            for take in options:
                table = dict(balance)
                if take:
                    table[t] = table.get(t, 0) + 1
                    table[h] = table.get(h, 0) - 1
                if any(table.get(v, 0) != 0 for v in closing):
                    continue
                key = tuple(sorted((v, b) for v, b in table.items() if b != 0))
                nxt[(key, parity ^ int(take))] += ways
        states = nxt

    even = sum(w for (_, parity), w in states.items() if parity == 0)
    odd = sum(w for (_, parity), w in states.items() if parity == 1)
    logger.debug(f"Eulerian sub-digraphs: even={even}, odd={odd}, through={through}")
    return EulerianCount(even_count=even, odd_count=odd)


def alon_tarsi_coefficient(g: Graph, d: Orientation) -> int:
    """
    |EE(D)| - |EO(D)|, equal up to sign to the coefficient of prod x_v^{d+(v)} in Q_G.

    Raises:
        InputError: If d is not an orientation of g
    """
    if set(d.heads) != g.edge_set:
        logger.error("alon_tarsi_coefficient: orientation does not match graph")
        raise InputError("orientation does not cover exactly the graph edges")
    return count_eulerian(d).difference


def out_degree_index(g: Graph, d: Orientation) -> IndexFunction:
    """eta(v) = out-degree of v under d, zero on edges."""
    return IndexFunction(vertices={v: d.out_degree(v) for v in g.vertices})


def expand_polynomial_oracle(
    g: Graph,
    d: Optional[Orientation] = None,
    restrict_edges_to_zero: bool = False,
    edge_limit: Optional[int] = None,
) -> PolynomialOracleResult:
    """
    Expand P_G (or Q_G) into monomials by direct multiplication.

    The factor for arc f = (a -> b) is the row of A_G at f read as a linear
    form, so coefficients line up with permanents of A_G(eta).

    Args:
        g: Graph
        d: Orientation (canonical when omitted)
        restrict_edges_to_zero: Set every edge variable to 0 (Q_G)
        edge_limit: Scale guard (settings.oracle_edge_limit by default)

    Raises:
        ScaleGuardError: If |E| exceeds the guard
    """
    limit = edge_limit if edge_limit is not None else settings.oracle_edge_limit
    if g.edge_count > limit:
        logger.error(f"Polynomial oracle refused: |E| = {g.edge_count} > {limit}")
        raise ScaleGuardError("polynomial oracle", g.edge_count, limit)

    base = build_coefficient_matrix(g, d)
    elements = base.columns
    names = [f"x{i}" for i in range(len(elements))]
    R, *xs = ring(",".join(names), ZZ)
    active = [j for j, z in enumerate(elements) if not (restrict_edges_to_zero and isinstance(z, tuple))]

    poly = R.one
    for r in range(len(base.rows)):
        factor = R.zero
        for j in active:
            a = int(base.values[r, j])
            if a:
                factor += a * xs[j]
        poly *= factor

    coefficients: Dict[Tuple[int, ...], int] = {
        tuple(int(x) for x in monom): int(coeff) for monom, coeff in poly.terms()
    }
    logger.debug(f"Expanded polynomial: {len(coefficients)} monomials over {len(elements)} variables")
    return PolynomialOracleResult(elements=elements, coefficients=coefficients)


def directed_cycle(vertices: List[int]) -> Orientation:
    """Arcs v_0 -> v_1 -> ... -> v_{n-1} -> v_0."""
    n = len(vertices)
    return Orientation(arcs=tuple((vertices[i], vertices[(i + 1) % n]) for i in range(n)))
