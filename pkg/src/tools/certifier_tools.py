"""
Halin Weight Certifier - Certifier Tools

CONTEXT:
This module produces and checks certificates: edge-only index functions eta
with eta(e) <= 2 and per(A_G(eta)) != 0.
- certify: dispatch on bipartiteness, falling back to search on any
  constructive failure
- certify_nonbipartite / build_case_orientation: Eulerian-count orientation,
  vertex columns eta(v) = out-degree, balloon expansion modulo 3
- certify_wheel: odd wheels (direct search up to 5 rim vertices, vertex
  removal plus two balloons at the removed rim vertex above that)
- search_certificate: bounded enumeration, also usable on non-Halin graphs
- verify_certificate: recheck shape, size and the exact permanent

FALLBACK POLICY:
FallbackNeeded and ConsistencyError raised by a constructive path are logged
and the search result is returned with provenance "search" and the reason in
aux["fallback"]. A search that finds nothing on a Halin graph is a
ConsistencyError.

DEPENDENCIES:
- src.tools.alon_tarsi_tools: Eulerian counts for the orientation check
- src.tools.matrix_tools: Matrices, permanents, balloon columns, expansion
- src.tools.bipartite_tools: The bipartite construction

USAGE:
    from src.tools.certifier_tools import certify, verify_certificate

    wheel = build_wheel(7)
    certificate = certify(wheel)
    print(certificate.provenance, verify_certificate(wheel.graph, certificate).ok)
"""

import logging
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from src.config import settings
from src.errors import ConsistencyError, FallbackNeeded, InputError, ScaleGuardError
from src.models import (
    Balloon,
    Certificate,
    CoefficientMatrix,
    Edge,
    Graph,
    HalinGraph,
    IndexFunction,
    Orientation,
    OrientationCase,
    Provenance,
    SymbolicColumn,
    VerificationReport,
    canonical_edge,
)
from src.tools.alon_tarsi_tools import count_eulerian
from src.tools.bipartite_tools import certify_bipartite
from src.tools.graph_tools import bipartition, find_odd_balloons, ordering_from_sequence
from src.tools.matrix_tools import (
    assemble,
    balloon_combination,
    build_coefficient_matrix,
    certificate_from_eta,
    expand_to_edge_columns,
    permanent_exact,
    permanent_mod,
)

logger = logging.getLogger(__name__)

_FILTER_PRIME = 2_147_483_647


# ============================================================================
# DISPATCH
# ============================================================================

def certify(h: HalinGraph) -> Certificate:
    """
    Certificate for any generalized Halin graph.

    Example:
        >>> certify(build_wheel(7)).provenance
        <Provenance.WHEEL_LARGE: 'wheel-large'>
    """
    g = h.graph
    coloring = bipartition(g)
    logger.info(
        f"Certifying Halin graph: |V|={g.vertex_count}, |E|={g.edge_count}, "
        f"bipartite={coloring.is_bipartite}"
    )
    try:
        if coloring.is_bipartite:
            certificate = certify_bipartite(h)
        else:
            certificate = certify_nonbipartite(h)
        report = verify_certificate(g, certificate)
        if not report.ok:
            raise ConsistencyError(f"constructed certificate failed verification: {report.reason}")
        return certificate
    except (FallbackNeeded, ConsistencyError) as e:
        logger.warning(f"Constructive path failed ({e}); falling back to search")
        reason = str(e)

    found = search_certificate(g)
    if found is None:
        logger.error("Search found no certificate for a Halin graph")
        raise ConsistencyError("no certificate exists within the search bounds")
    return found.model_copy(update={"aux": {**found.aux, "fallback": reason}})


# ============================================================================
# NON-BIPARTITE GRAPHS
# ============================================================================

def _nonbipartite_anchors(h: HalinGraph) -> Tuple[int, Optional[int]]:
    """Root (smallest non-leaf) and the deepest vertex whose sons are all leaves."""
    tree = h.tree
    leaves = set(tree.leaves)
    root = min(v for v in tree.vertices if v not in leaves)
    if h.is_wheel:
        return root, None
    t = tree.reroot(root)
    internal = [v for v in t.vertices if v != root and t.sons(v)]
    deep = min(internal, key=lambda v: (-t.depth[v], v))
    return root, deep


def orientation_case(h: HalinGraph) -> OrientationCase:
    """The orientation recipe matching the leaf parity and the sons of v."""
    if len(h.cycle) % 2 == 0:
        return OrientationCase.EVEN_LEAVES
    if h.is_wheel:
        raise InputError("odd wheels have no orientation recipe")
    root, v = _nonbipartite_anchors(h)
    k = len(h.tree.reroot(root).sons(v))
    return OrientationCase.ODD_K_EVEN if k % 2 == 0 else OrientationCase.ODD_K_ODD


def build_case_orientation(h: HalinGraph, case: OrientationCase) -> Orientation:
    """
    Orientation with out-degree <= 2 and |EE| - |EO| != 0 mod 3.

    Tree edges point to the root (the smallest non-leaf id) and the leaf
    cycle runs backwards through the plane order. For odd leaf counts the
    deepest all-leaf vertex v sends its edge to its last son v_k, and for odd
    k the cycle edge entering v_k is also reversed.

    Raises:
        InputError: If case does not match the graph
    """
    actual = orientation_case(h)
    if actual != case:
        logger.error(f"Orientation case {case.value} requested, graph needs {actual.value}")
        raise InputError(f"graph needs orientation case {actual.value}, not {case.value}")

    root, v = _nonbipartite_anchors(h)
    t = h.tree.reroot(root)
    heads: Dict[Edge, int] = {}
    for u, parent in t.parent.items():
        if parent is not None:
            heads[canonical_edge(u, parent)] = parent

    cycle = t.leaves
    n = len(cycle)
    for i in range(n):
        heads[canonical_edge(cycle[i], cycle[(i + 1) % n])] = cycle[i]

    if case != OrientationCase.EVEN_LEAVES:
        vk = t.sons(v)[-1]
        heads[canonical_edge(v, vk)] = vk
        if case == OrientationCase.ODD_K_ODD:
            after = cycle[(cycle.index(vk) + 1) % n]
            heads[canonical_edge(vk, after)] = after

    orientation = Orientation.from_map(heads)
    worst = max(orientation.out_degrees().values())
    if worst > 2:
        raise ConsistencyError(f"orientation has out-degree {worst}")
    return orientation


def expected_through_counts(k: int) -> Tuple[int, int]:
    """(even, odd) Eulerian sub-digraphs through v v_k for k leaf sons."""
    if k % 2 == 0:
        return k // 2 - 1, k // 2
    return (k - 1) // 2, (k - 1) // 2


def _balloon_columns(
    g: Graph,
    eta: IndexFunction,
    forbidden: Tuple[Edge, ...] = (),
) -> Tuple[List[SymbolicColumn], Dict[int, Balloon]]:
    """Replace every vertex column by its doubled balloon combination."""
    base = build_coefficient_matrix(g)
    columns: List[SymbolicColumn] = [SymbolicColumn.pure(e) for e, n in eta.edges.items() for _ in range(n)]
    used: Dict[int, Balloon] = {}
    for v, n in eta.vertices.items():
        found = find_odd_balloons(g, v, forbidden, 1)
        if not found:
            raise FallbackNeeded(f"no odd balloon rooted at {v}")
        used[v] = found[0]
        columns.extend([balloon_combination(found[0], base)] * n)
    return columns, used


def _expand(base: CoefficientMatrix, columns: List[SymbolicColumn], p: Optional[int]) -> IndexFunction:
    try:
        return expand_to_edge_columns(base, columns, p=p, cap=settings.edge_cap)
    except InputError as e:
        raise FallbackNeeded(f"balloon columns are singular: {e}") from e


def _balloon_doc(b: Balloon) -> Dict[str, Any]:
    return {"path": list(b.path_vertices), "cycle": list(b.cycle_vertices)}


def certify_nonbipartite(h: HalinGraph) -> Certificate:
    """
    Certificate for a non-bipartite generalized Halin graph.

    Raises:
        InputError: If h is bipartite
        FallbackNeeded: Eulerian difference divisible by 3 or an expansion failure
    """
    g = h.graph
    if bipartition(g).is_bipartite:
        raise InputError("graph is bipartite")
    if h.is_wheel and len(h.cycle) % 2 == 1:
        return certify_wheel(h)

    case = orientation_case(h)
    orientation = build_case_orientation(h, case)
    counts = count_eulerian(orientation)
    if counts.difference % 3 == 0:
        logger.warning(f"Eulerian difference {counts.difference} is divisible by 3")
        raise FallbackNeeded("Alon-Tarsi coefficient vanishes mod 3")

    aux: Dict[str, Any] = {
        "orientation": [list(a) for a in orientation.arcs],
        "eulerian": [counts.even_count, counts.odd_count],
    }
    if case != OrientationCase.EVEN_LEAVES:
        root, v = _nonbipartite_anchors(h)
        t = h.tree.reroot(root)
        k = len(t.sons(v))
        through = count_eulerian(orientation, through=canonical_edge(v, t.sons(v)[-1]))
        expected = expected_through_counts(k)
        if (through.even_count, through.odd_count) != expected:
            logger.warning(
                f"Eulerian counts through v v_k differ from closed form for k={k}: "
                f"{(through.even_count, through.odd_count)} vs {expected}"
            )
        aux["k"] = k

    eta = IndexFunction(vertices=orientation.out_degrees())
    columns, balloons = _balloon_columns(g, eta)
    aux["balloons"] = {str(v): _balloon_doc(b) for v, b in balloons.items()}
    edge_eta = _expand(build_coefficient_matrix(g), columns, settings.modulus)

    provenance = {
        OrientationCase.EVEN_LEAVES: Provenance.NONBIP_EVEN_LEAVES,
        OrientationCase.ODD_K_EVEN: Provenance.NONBIP_ODD_K_EVEN,
        OrientationCase.ODD_K_ODD: Provenance.NONBIP_ODD_K_ODD,
    }[case]
    return certificate_from_eta(g, edge_eta, provenance, aux)


def certify_wheel(h: HalinGraph) -> Certificate:
    """
    Certificate for an odd wheel W_n.

    n <= 5 uses search. Otherwise G - v_n gets the ordering v_1, w, v_2, ...,
    v_{n-1} with balloons avoiding E(v_1), v_{n-1}w and v_2w, and v_n then
    adds three doubled columns spread over the balloons {v_n, w, v_{n-1}}
    and {v_n, v_1, v_2, w}, expanded with exact permanents.

    Raises:
        InputError: If h is not a wheel with an odd rim
    """
    if not h.is_wheel or len(h.cycle) % 2 == 0:
        logger.error("certify_wheel called on a graph that is not an odd wheel")
        raise InputError("not an odd wheel")
    g = h.graph
    rim = list(h.cycle)
    n = len(rim)
    if n <= 5:
        found = search_certificate(g)
        if found is None:
            raise ConsistencyError(f"W_{n} has no certificate within the search bounds")
        return found.model_copy(update={"provenance": Provenance.WHEEL_SMALL})

    w = next(u for u in h.tree.vertices if u not in set(rim))
    v = {i + 1: rim[i] for i in range(n)}
    reduced = g.without_vertex(v[n])
    ordering = ordering_from_sequence(reduced, [v[1], w] + [v[i] for i in range(2, n)], 2)
    eta_reduced = IndexFunction(vertices=ordering.as_dict())
    forbidden = tuple(reduced.incidence[v[1]]) + (canonical_edge(v[n - 1], w), canonical_edge(v[2], w))
    columns, balloons = _balloon_columns(reduced, eta_reduced, forbidden)
    reduced_eta = _expand(build_coefficient_matrix(reduced), columns, settings.modulus)
    if any(reduced_eta[e] for e in forbidden):
        raise ConsistencyError("reduced index function uses a forbidden edge")

    base = build_coefficient_matrix(g)
    b1 = Balloon(path_vertices=(v[n],), cycle_vertices=(v[n], w, v[n - 1]))
    b2 = Balloon(path_vertices=(v[n], v[1]), cycle_vertices=(v[1], v[2], w))
    spread = [b1, b2, b1]
    full_columns = [SymbolicColumn.pure(e) for e, m in reduced_eta.edges.items() for _ in range(m)]
    full_columns += [balloon_combination(b, base) for b in spread[:g.degree(v[n])]]
    edge_eta = _expand(base, full_columns, None)

    aux = {
        "rim": rim,
        "centre": w,
        "balloons": {str(u): _balloon_doc(b) for u, b in balloons.items()},
        "removed_vertex_balloons": [_balloon_doc(b1), _balloon_doc(b2)],
    }
    return certificate_from_eta(g, edge_eta, Provenance.WHEEL_LARGE, aux)


# ============================================================================
# SEARCH AND VERIFICATION
# ============================================================================

def _candidates(edges: Tuple[Edge, ...], total: int, cap: int) -> Iterator[Dict[Edge, int]]:
    """Edge-only index functions summing to `total`, all-ones first."""
    order = [1] + list(range(cap, 1, -1)) + [0]
    values: Dict[Edge, int] = {}

    def walk(i: int, left: int) -> Iterator[Dict[Edge, int]]:
        if i == len(edges):
            if left == 0:
                yield dict(values)
            return
        rest = len(edges) - i - 1
        for x in order:
            if x <= left and left - x <= rest * cap:
                values[edges[i]] = x
                yield from walk(i + 1, left - x)
        values.pop(edges[i], None)

    yield from walk(0, total)


def search_certificate(
    g: Graph,
    edge_cap: Optional[int] = None,
    budget: Optional[int] = None,
    edge_limit: Optional[int] = None,
) -> Optional[Certificate]:
    """
    First edge-only eta with eta(e) <= edge_cap and per(A_G(eta)) != 0.

    Candidates are filtered by the permanent modulo a 31-bit prime and the
    first survivor is confirmed exactly.

    Returns:
        Certificate with provenance "search", or None when none exists within budget

    Raises:
        ScaleGuardError: If |E| exceeds the search guard
    """
    cap = edge_cap if edge_cap is not None else settings.edge_cap
    budget = budget if budget is not None else settings.search_budget
    limit = edge_limit if edge_limit is not None else settings.search_edge_limit
    if g.edge_count > limit:
        logger.error(f"Search refused: |E| = {g.edge_count} > {limit}")
        raise ScaleGuardError("certificate search", g.edge_count, limit)
    if g.edge_count == 0:
        return None

    base = build_coefficient_matrix(g)
    tried = 0
    for values in _candidates(g.edges, g.edge_count, cap):
        if tried >= budget:
            logger.warning(f"Search budget of {budget} candidates exhausted")
            break
        tried += 1
        matrix = assemble(base, IndexFunction(edges=values))
        if permanent_mod(matrix, _FILTER_PRIME) == 0:
            continue
        per = permanent_exact(matrix)
        logger.info(f"Search found a certificate after {tried} candidates")
        return Certificate(eta=matrix.eta, permanent=per, provenance=Provenance.SEARCH, aux={"tried": tried})
    logger.info(f"Search found no certificate among {tried} candidates")
    return None


def verify_certificate(g: Union[Graph, HalinGraph], c: Certificate) -> VerificationReport:
    """
    Recheck a certificate under the canonical orientation.

    Reasons: "vertex-column", "support", "multiplicity", "count", "singular",
    "permanent-mismatch".
    """
    if isinstance(g, HalinGraph):
        g = g.graph
    eta = c.eta
    if eta.vertices:
        return VerificationReport(ok=False, reason="vertex-column")
    if not eta.is_supported_on(g):
        return VerificationReport(ok=False, reason="support")
    if eta.max_edge() > settings.edge_cap:
        return VerificationReport(ok=False, reason="multiplicity")
    if eta.total() != g.edge_count:
        return VerificationReport(ok=False, reason="count")
    per = permanent_exact(assemble(build_coefficient_matrix(g), eta))
    if per == 0:
        return VerificationReport(ok=False, reason="singular", permanent=0)
    if per != c.permanent:
        return VerificationReport(ok=False, reason="permanent-mismatch", permanent=per)
    return VerificationReport(ok=True, permanent=per)
