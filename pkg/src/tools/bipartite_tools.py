"""
Halin Weight Certifier - Bipartite Tools

CONTEXT:
This module certifies bipartite generalized Halin graphs. The vertex set is
split as V = X u Y so that the subgraph H spanned by E[X] u E[X,Y] has a
non-singular (0,2) matrix without crossing-edge columns; the components of
G[Y] are then attached block by block:

- choose_bipartite_partition: root, deepest leaf v1, its father v2 and
  grandfather v3, and the case split on the number of sons of v3
- build_case1_certificate: the fixed 7- or 8-column matrices around v3
- build_sink_source_assignment / check_assignment: orientation of H plus a
  map phi onto source and sink edges with preimages of size <= 2
- compose_blocks: per-component vertex-column matrices rewritten over edge
  columns, then the block-triangular assembly of the final index function
- certify_bipartite: tries every admissible root before giving up

CASES (hub = the vertex whose sons are counted):
- case1: hub has 2 or 3 sons; X = {hub, v2, v1, w}, w a leaf son next to v2
- case2: hub has >= 4 sons; X = hub plus all its descendants
- case3: v3 has one son; X = v4 plus descendants within distance 2, unless
  a son of v4 has tree degree >= 3, which then becomes the hub

DEPENDENCIES:
- networkx: Components of G[Y], paths inside blocks, max-flow for case3 phi
- src.tools.matrix_tools: Matrices, permanents and branch-and-prune expansion
- src.tools.graph_tools: Bipartition, degeneracy orderings, graph builders
"""

import logging
from math import prod
from typing import Any, Dict, List, Optional, Set

import networkx as nx
import numpy as np

from src.config import settings
from src.errors import ConsistencyError, FallbackNeeded, InputError
from src.models import (
    BipartiteCase,
    Certificate,
    Edge,
    EdgeAssignment,
    Graph,
    HalinGraph,
    IndexFunction,
    Orientation,
    PartitionPlan,
    PlaneTree,
    Provenance,
    SymbolicColumn,
    WeightMatrix,
    canonical_edge,
    edge_key,
)
from src.tools.graph_tools import bipartition, build_graph, degeneracy_ordering, to_networkx
from src.tools.matrix_tools import (
    assemble,
    build_coefficient_matrix,
    certificate_from_eta,
    expand_to_edge_columns,
    path_combination,
    permanent_exact,
)

logger = logging.getLogger(__name__)


# ============================================================================
# PARTITION
# ============================================================================

def admissible_roots(h: HalinGraph) -> List[int]:
    """Tree vertices of degree >= 3 in id order."""
    return [v for v in h.tree.vertices if h.tree.tree_degree(v) >= 3]


def _make_plan(
    h: HalinGraph,
    case: BipartiteCase,
    root: int,
    x: Set[int],
    anchors: Dict[str, int],
    sons: int = 0,
) -> PartitionPlan:
    g = h.graph
    y = [v for v in g.vertices if v not in x]
    e_x = [e for e in g.edges if e[0] in x and e[1] in x]
    e_xy = [e for e in g.edges if (e[0] in x) != (e[1] in x)]
    plan = PartitionPlan(
        case=case, root=root, x=tuple(sorted(x)), y=tuple(y),
        e_x=tuple(e_x), e_xy=tuple(e_xy), anchors=anchors, sons=sons,
    )
    logger.debug(f"Partition {case.value}: |X|={len(plan.x)}, |Y|={len(plan.y)}, anchors={anchors}")
    return plan


def _chain_son_next_to_leaf(t: PlaneTree, hub: int) -> Optional[int]:
    sons = t.sons(hub)
    for i, s in enumerate(sons):
        if len(t.sons(s)) != 1:
            continue
        neighbours = [sons[j] for j in (i - 1, i + 1) if 0 <= j < len(sons)]
        if any(not t.sons(u) for u in neighbours):
            return s
    return None


def choose_bipartite_partition(h: HalinGraph, root: Optional[int] = None) -> PartitionPlan:
    """
    Pick X for a bipartite generalized Halin graph.

    Args:
        h: Bipartite generalized Halin graph
        root: Tree vertex of degree >= 3 (smallest such id when omitted)

    Raises:
        InputError: Non-bipartite graph, path tree or inadmissible root
        FallbackNeeded: The tree does not have the shape the cases expect
    """
    if not bipartition(h.graph).is_bipartite:
        raise InputError("graph is not bipartite")
    roots = admissible_roots(h)
    if not roots:
        logger.error("choose_bipartite_partition: tree is a path")
        raise InputError("tree is a path")
    if root is None:
        root = roots[0]
    elif root not in roots:
        raise InputError(f"vertex {root} has tree degree < 3")

    t = h.tree.reroot(root)
    leaves = [v for v in t.vertices if v != root and not t.sons(v)]
    v1 = min(leaves, key=lambda v: (-t.depth[v], v))
    v2 = t.parent[v1]
    if v2 is None or len(t.sons(v2)) != 1 or t.parent[v2] is None:
        raise FallbackNeeded("father of the deepest leaf is not a degree-2 vertex")
    v3 = t.parent[v2]

    if len(t.sons(v3)) == 1:
        v4 = t.parent[v3]
        if v4 is None:
            raise FallbackNeeded("degree-2 vertex without a father")
        hub_candidates = [w for w in t.sons(v4) if t.tree_degree(w) >= 3]
        if not hub_candidates:
            x = {v4} | set(t.sons(v4)) | {g for s in t.sons(v4) for g in t.sons(s)}
            anchors = {"v1": v1, "v2": v2, "v3": v3, "v4": v4}
            if t.parent[v4] is not None:
                anchors["v5"] = t.parent[v4]
            return _make_plan(h, BipartiteCase.CASE3, root, x, anchors, len(t.sons(v4)))
        hub = hub_candidates[0]
        v2 = _chain_son_next_to_leaf(t, hub)
        if v2 is None:
            raise FallbackNeeded(f"son {hub} of v4 has no chain son next to a leaf")
        v1 = t.sons(v2)[0]
        if t.sons(v1):
            raise FallbackNeeded("replacement hub has a deeper subtree")
        v3 = hub

    sons = t.sons(v3)
    anchors = {"v1": v1, "v2": v2, "v3": v3}
    if t.parent[v3] is not None:
        anchors["v4"] = t.parent[v3]

    if len(sons) in (2, 3):
        i = sons.index(v2)
        for j in (i + 1, i - 1):
            w = sons[j % len(sons)] if v3 == root else (sons[j] if 0 <= j < len(sons) else None)
            if w is not None and w != v2 and not t.sons(w) and h.graph.has_edge(v1, w):
                break
        else:
            raise FallbackNeeded("no leaf son of v3 next to v1 on the cycle")
        anchors["w"] = w
        return _make_plan(h, BipartiteCase.CASE1, root, {v3, v2, v1, w}, anchors, len(sons))

    if len(sons) >= 4:
        chains = [s for s in sons if s != v2 and t.sons(s)]
        if not chains:
            raise FallbackNeeded("hub has no second chain son")
        w = chains[0]
        if len(t.sons(w)) != 1:
            raise FallbackNeeded(f"son {w} of the hub branches")
        anchors["w"] = w
        anchors["w2"] = t.sons(w)[0]
        x = {v3} | set(t.descendants(v3))
        return _make_plan(h, BipartiteCase.CASE2, root, x, anchors, len(sons))

    raise FallbackNeeded(f"hub {v3} has {len(sons)} sons")


def _h_graph(plan: PartitionPlan) -> Graph:
    return build_graph(plan.h_edges)


# ============================================================================
# CASE 1
# ============================================================================

def build_case1_certificate(plan: PartitionPlan) -> WeightMatrix:
    """
    Fixed index function on H for case1.

    Two sons: 2x v1v2, 2x v2v3, 2x v3w, 1x v1w. Three sons: every one of
    these four edges twice. No column is a crossing edge.

    Raises:
        InputError: Wrong case or a son count outside {2, 3}
        FallbackNeeded: The resulting matrix is not square or is singular
    """
    if plan.case != BipartiteCase.CASE1 or plan.sons not in (2, 3):
        raise InputError(f"case1 needs 2 or 3 sons, plan is {plan.case.value} with {plan.sons}")
    a = plan.anchors
    v1, v2, v3, w = a["v1"], a["v2"], a["v3"], a["w"]
    eta = IndexFunction(edges={
        canonical_edge(v1, v2): 2,
        canonical_edge(v2, v3): 2,
        canonical_edge(v3, w): 2,
        canonical_edge(v1, w): 1 if plan.sons == 2 else 2,
    })
    h_graph = _h_graph(plan)
    if eta.total() != h_graph.edge_count:
        raise FallbackNeeded(f"case1 matrix has {eta.total()} columns for {h_graph.edge_count} rows")
    matrix = assemble(build_coefficient_matrix(h_graph), eta)
    if permanent_exact(matrix) == 0:
        raise FallbackNeeded("case1 matrix is singular")
    return matrix


# ============================================================================
# CASES 2 AND 3: SINK/SOURCE ASSIGNMENT
# ============================================================================

def _levels(t: PlaneTree, hub: int, x: Set[int]) -> Dict[int, int]:
    """Tree distance from the hub for every X vertex."""
    levels = {hub: 0}
    for s in t.sons(hub):
        levels[s] = 1
        for g in t.sons(s):
            if g in x:
                levels[g] = 2
    return levels


def _hub_orientation(plan: PartitionPlan, levels: Dict[int, int]) -> Orientation:
    """Hub is a sink, distance-2 vertices are sources, sons take the rest."""
    heads: Dict[Edge, int] = {}
    for e in plan.h_edges:
        a, b = e
        la, lb = levels.get(a), levels.get(b)
        if la == 0 or lb == 0:
            heads[e] = a if la == 0 else b
        elif la == 2 or lb == 2:
            heads[e] = b if la == 2 else a
        else:
            heads[e] = a if la == 1 else b
    return Orientation.from_map(heads)


def _is_source_or_sink(f: Edge, orientation: Orientation, h_edges: Set[Edge]) -> bool:
    adjacent = [e for e in h_edges if e != f and (set(e) & set(f))]
    sink = all(orientation.head(e) in f for e in adjacent)
    source = all(orientation.tail(e) in f for e in adjacent)
    return sink or source


def check_assignment(plan: PartitionPlan, assignment: EdgeAssignment) -> List[str]:
    """All violated EdgeAssignment invariants (empty when sound)."""
    h_edges = set(plan.h_edges)
    e_x = set(plan.e_x)
    problems: List[str] = []
    if set(assignment.phi) != h_edges:
        problems.append("domain differs from E[X] u E[X,Y]")
    if set(assignment.orientation.heads) != h_edges:
        problems.append("orientation does not cover H")
        return problems
    for e, f in assignment.phi.items():
        if f == e:
            problems.append(f"phi({edge_key(e)}) is itself")
        elif not set(e) & set(f):
            problems.append(f"phi({edge_key(e)}) = {edge_key(f)} is not incident")
        elif f not in e_x:
            problems.append(f"phi({edge_key(e)}) = {edge_key(f)} is outside E[X]")
        elif not _is_source_or_sink(f, assignment.orientation, h_edges):
            problems.append(f"{edge_key(f)} is neither a source nor a sink edge")
    for f, n in assignment.preimage_sizes().items():
        if n > settings.edge_cap:
            problems.append(f"{edge_key(f)} has {n} preimages")
    return problems


def _pendant(t: PlaneTree, leaf: int) -> Edge:
    return canonical_edge(leaf, t.parent[leaf])


def _case2_phi(h: HalinGraph, t: PlaneTree, plan: PartitionPlan) -> Dict[Edge, Edge]:
    a = plan.anchors
    hub, v1, v2, w, w2 = a["v3"], a["v1"], a["v2"], a["w"], a["w2"]
    x = set(plan.x)
    e4 = canonical_edge(hub, w)
    phi: Dict[Edge, Edge] = {}

    sons = list(t.sons(hub))
    i = sons.index(v2)
    ring = [canonical_edge(hub, s) for s in sons[i:] + sons[:i] if s != w]
    for j, e in enumerate(ring):
        phi[e] = ring[(j + 1) % len(ring)]
    phi[e4] = canonical_edge(w, w2)
    for s in sons:
        for g in t.sons(s):
            phi[canonical_edge(s, g)] = canonical_edge(hub, s)
    if "v4" in a:
        phi[canonical_edge(hub, a["v4"])] = e4

    block = [v for v in t.leaves if v in x]
    pos = {v: k for k, v in enumerate(block)}
    wraps = len(block) == len(t.leaves)

    def distance(v: int) -> int:
        d = abs(pos[v] - pos[v1])
        return min(d, len(block) - d) if wraps else d

    for e in h.cycle_edges:
        ends = [v for v in e if v in x]
        if not ends:
            continue
        target = min(ends, key=lambda v: (distance(v), v))
        phi[e] = _pendant(t, target)
    return phi


def _case3_phi(t: PlaneTree, plan: PartitionPlan, orientation: Orientation) -> Dict[Edge, Edge]:
    a = plan.anchors
    v1, v2, v3, v4 = a["v1"], a["v2"], a["v3"], a["v4"]
    h_edges = set(plan.h_edges)
    e4 = canonical_edge(v4, v3)
    e5 = canonical_edge(v3, v2)
    fixed: Dict[Edge, Edge] = {e4: e5, e5: e4, canonical_edge(v2, v1): e5}
    if "v5" in a:
        fixed[canonical_edge(v4, a["v5"])] = e4

    targets = [f for f in plan.e_x if f in t.edges and _is_source_or_sink(f, orientation, h_edges)]
    phi = _flow_assignment(plan, targets, fixed)
    if phi is None:
        logger.warning("case3: pinned v4-v3-v2 chain cannot be completed, retrying unpinned")
        phi = _flow_assignment(plan, targets, {})
    if phi is None:
        raise FallbackNeeded("case3: no sink/source assignment with preimages <= 2")
    return phi


def _flow_assignment(plan: PartitionPlan, targets: List[Edge], seed: Dict[Edge, Edge]) -> Optional[Dict[Edge, Edge]]:
    """Complete `seed` to a full phi by max-flow, or None."""
    load: Dict[Edge, int] = {}
    for f in seed.values():
        load[f] = load.get(f, 0) + 1
    pending = [e for e in plan.h_edges if e not in seed]

    flow_graph = nx.DiGraph()
    for e in pending:
        flow_graph.add_edge("source", ("d", e), capacity=1)
        for f in targets:
            if f != e and set(f) & set(e):
                flow_graph.add_edge(("d", e), ("t", f), capacity=1)
    for f in targets:
        room = settings.edge_cap - load.get(f, 0)
        if room > 0:
            flow_graph.add_edge(("t", f), "sink", capacity=room)
    if not pending:
        return dict(seed)
    if "sink" not in flow_graph:
        return None

    value, flow = nx.maximum_flow(flow_graph, "source", "sink")
    if value < len(pending):
        return None
    phi = dict(seed)
    for e in pending:
        for node, amount in flow[("d", e)].items():
            if amount:
                phi[e] = node[1]
    return phi


def build_sink_source_assignment(h: HalinGraph, plan: PartitionPlan) -> EdgeAssignment:
    """
    Orientation of H and phi: E[X] u E[X,Y] -> E[X] for case2 and case3.

    Case2 follows the fixed recipe around the hub v3 (cyclic hub edges from
    v3v2, v3w -> ww', chain edges onto their hub edge, v3v4 -> v3w, cycle
    edges onto the pendant edge of the X leaf nearer to v1). Case3 fixes the
    chain v4-v3-v2 and completes phi by max-flow.

    Raises:
        InputError: Plan is case1
        FallbackNeeded: No assignment could be completed
    """
    if plan.case == BipartiteCase.CASE1:
        raise InputError("case1 has no sink/source assignment")
    t = h.tree.reroot(plan.root)
    hub = plan.anchors["v3"] if plan.case == BipartiteCase.CASE2 else plan.anchors["v4"]
    orientation = _hub_orientation(plan, _levels(t, hub, set(plan.x)))

    if plan.case == BipartiteCase.CASE2:
        phi = _case2_phi(h, t, plan)
    else:
        phi = _case3_phi(t, plan, orientation)
    return EdgeAssignment(phi=phi, orientation=orientation)


# ============================================================================
# BLOCK COMPOSITION
# ============================================================================

def _pendant_block_index(g_i: Graph, x: int) -> IndexFunction:
    """
    Edge index function of G_i = G[Y_i] + x y_i plus one column at x.

    The degeneracy vertex columns (x last, back-degree 1) are shifted by
    +/- A(x) along a path from x, written over edge columns and expanded
    modulo `settings.modulus` with the x column kept pure.
    """
    if g_i.edge_count == 1:
        return IndexFunction()
    ordering = degeneracy_ordering(g_i, 2, last=x)
    base = build_coefficient_matrix(g_i)
    nxg = to_networkx(g_i)
    columns: List[SymbolicColumn] = []
    for v, d in zip(ordering.order, ordering.back_degrees):
        if v == x:
            columns.append(SymbolicColumn.pure(x))
        elif d:
            columns.extend([path_combination(nx.shortest_path(nxg, x, v), base)] * d)
    eta = expand_to_edge_columns(base, columns, p=settings.modulus, cap=settings.edge_cap)
    if eta.vertices != {x: 1}:
        raise ConsistencyError("pendant column did not survive the expansion")
    return IndexFunction(edges=eta.edges)


def _block_permanent(g_i: Graph, e_i: Edge, eta_i: IndexFunction) -> int:
    """per(A'_i): rows E(G_i) - e_i, columns the edge multiset of eta_i."""
    if not eta_i.edges:
        return 1
    base = build_coefficient_matrix(g_i)
    keep = [r for r, e in enumerate(base.rows) if e != e_i]
    cols = np.stack([base.column(e)[keep] for e, n in eta_i.items() for _ in range(n)], axis=1)
    return permanent_exact(cols)


def compose_blocks(
    g: Graph,
    plan: PartitionPlan,
    h_matrix: WeightMatrix,
    provenance: Provenance,
    aux: Optional[Dict[str, Any]] = None,
) -> Certificate:
    """
    Extend a non-singular matrix of H to the whole graph.

    For every component Y_i of G[Y], e_i is its smallest crossing edge and
    A'_i comes from G_i = G[Y_i] + e_i. The final index function is eta on
    E[X], eta_i on E(G_i) and 0 on the remaining crossing edges.

    Raises:
        InputError: h_matrix uses a crossing-edge column or is singular
        ConsistencyError: A block is singular or the product identity fails
    """
    h_eta = h_matrix.eta
    crossing = set(plan.e_xy)
    if any(e in crossing for e in h_eta.edges) or h_eta.vertices:
        raise InputError("H matrix must use only E[X] edge columns")
    per_h = permanent_exact(h_matrix)
    if per_h == 0:
        raise InputError("H matrix is singular")

    y_graph = g.induced(plan.y)
    components = sorted(
        (sorted(c) for c in nx.connected_components(to_networkx(y_graph))),
        key=lambda c: c[0],
    ) if plan.y else []

    edges: Dict[Edge, int] = dict(h_eta.edges)
    block_pers: List[int] = []
    blocks: List[Dict[str, Any]] = []
    for comp in components:
        members = set(comp)
        e_i = min(e for e in crossing if (e[0] in members) != (e[1] in members))
        x_i = e_i[0] if e_i[0] not in members else e_i[1]
        g_i = build_graph(list(y_graph.induced(members).edges) + [e_i], vertices=members | {x_i})
        eta_i = _pendant_block_index(g_i, x_i)
        per_i = _block_permanent(g_i, e_i, eta_i)
        if per_i == 0:
            logger.error(f"Block at {edge_key(e_i)} is singular")
            raise ConsistencyError(f"block for component at {edge_key(e_i)} is singular")
        block_pers.append(per_i)
        blocks.append({"connector": edge_key(e_i), "permanent": str(per_i)})
        for e, n in eta_i.edges.items():
            edges[e] = edges.get(e, 0) + n

    info = dict(aux or {})
    info["blocks"] = blocks
    certificate = certificate_from_eta(g, IndexFunction(edges=edges), provenance, info)
    expected = per_h * prod(block_pers)
    if certificate.permanent != expected:
        logger.error(f"Block product mismatch: {certificate.permanent} != {expected}")
        raise ConsistencyError("per(A') differs from per(A) times the block permanents")
    return certificate


# ============================================================================
# DRIVER
# ============================================================================

def _provenance(plan: PartitionPlan) -> Provenance:
    if plan.case == BipartiteCase.CASE1:
        return Provenance.BIP_CASE1_TWO_SONS if plan.sons == 2 else Provenance.BIP_CASE1_THREE_SONS
    return Provenance.BIP_CASE2 if plan.case == BipartiteCase.CASE2 else Provenance.BIP_CASE3


def certify_for_root(h: HalinGraph, root: int) -> Certificate:
    """Run the bipartite construction with one fixed root."""
    plan = choose_bipartite_partition(h, root)
    aux: Dict[str, Any] = {"plan": plan.model_dump(mode="json")}
    if plan.case == BipartiteCase.CASE1:
        h_matrix = build_case1_certificate(plan)
    else:
        assignment = build_sink_source_assignment(h, plan)
        problems = check_assignment(plan, assignment)
        if problems:
            logger.warning(f"Assignment rejected at root {root}: {problems[:3]}")
            raise FallbackNeeded(f"assignment invariant broken: {problems[0]}")
        h_matrix = assemble(build_coefficient_matrix(_h_graph(plan)), assignment.eta())
        if permanent_exact(h_matrix) == 0:
            raise FallbackNeeded("sink/source matrix of H is singular")
        aux["phi"] = {edge_key(e): edge_key(f) for e, f in sorted(assignment.phi.items())}
        aux["orientation"] = [list(arc) for arc in assignment.orientation.arcs]
    return compose_blocks(h.graph, plan, h_matrix, _provenance(plan), aux)


def certify_bipartite(h: HalinGraph) -> Certificate:
    """
    Certificate for a bipartite generalized Halin graph.

    Raises:
        FallbackNeeded: No admissible root produced a certificate
    """
    for root in admissible_roots(h):
        try:
            return certify_for_root(h, root)
        except FallbackNeeded as e:
            logger.warning(f"Bipartite construction failed at root {root}: {e}")
    raise FallbackNeeded("no admissible root produced a certificate")
