"""
Halin Weight Certifier - Graph Tools

CONTEXT:
This module implements construction and structural queries over graphs,
plane trees and generalized Halin graphs:
- build_graph / build_halin / star_tree / build_wheel: constructors
- bipartition: 2-colouring or an odd-cycle witness
- degeneracy_ordering / ordering_from_sequence: back-degree bounded orders
- find_odd_balloons: edge-disjoint odd balloons with a given root
- random_plane_tree / enumerate_plane_trees: instance generators

All results are immutable models; every function is pure.

DEPENDENCIES:
- networkx: Connectivity, BFS trees and core numbers
- src.models: Graph, PlaneTree, HalinGraph, Balloon, DegeneracyOrdering

USAGE:
    from src.tools.graph_tools import build_halin, star_tree, bipartition

    wheel = build_halin(star_tree(5))
    print(bipartition(wheel.graph).odd_cycle)
"""

import logging
import random
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
from pydantic import ValidationError

from src.errors import InputError
from src.models import (
    Balloon,
    DegeneracyOrdering,
    Edge,
    Graph,
    HalinGraph,
    HalinKind,
    PlaneTree,
    TwoColoring,
    canonical_edge,
)

logger = logging.getLogger(__name__)


# ============================================================================
# CONSTRUCTORS
# ============================================================================

def build_graph(
    edge_list: Iterable[Sequence[int]],
    vertices: Optional[Iterable[int]] = None,
) -> Graph:
    """
    Build a simple graph from vertex pairs.

    Args:
        edge_list: Pairs (u, v); duplicates collapse, order is irrelevant
        vertices: Extra (possibly isolated) vertex ids

    Returns:
        Graph with canonical edges

    Raises:
        InputError: If a pair is a loop

    Example:
        >>> build_graph([(1, 2), (2, 3), (1, 3)]).edge_count
        3
    """
    edges: Set[Edge] = set()
    verts: Set[int] = set(vertices or ())
    for pair in edge_list:
        u, v = (int(x) for x in pair)
        if u == v:
            logger.error(f"Rejected loop edge ({u}, {v})")
            raise InputError(f"loop edge ({u}, {v})")
        edges.add(canonical_edge(u, v))
        verts.update((u, v))
    return Graph(vertices=tuple(sorted(verts)), edges=tuple(sorted(edges)))


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices)
    nxg.add_edges_from(g.edges)
    return nxg


def build_halin(tree: PlaneTree, kind: HalinKind = HalinKind.GENERALIZED) -> HalinGraph:
    """
    Close a plane tree with the cycle through its leaves in DFS order.

    Raises:
        InputError: Fewer than 3 leaves, or a strict graph with an internal degree-2 vertex
    """
    try:
        halin = HalinGraph(tree=tree, kind=kind)
    except ValidationError as e:
        message = e.errors()[0]["msg"]
        logger.error(f"Cannot build Halin graph: {message}")
        raise InputError(message) from e
    logger.debug(
        f"Built {kind.value} Halin graph: {halin.graph.vertex_count} vertices, "
        f"{halin.graph.edge_count} edges, {len(halin.cycle)} leaves"
    )
    return halin


def star_tree(n: int) -> PlaneTree:
    """K_{1,n} rooted at its centre 0 with leaves 1..n."""
    if n < 3:
        raise InputError(f"a star needs at least 3 leaves, got {n}")
    return PlaneTree(root=0, children={0: tuple(range(1, n + 1))})


def build_wheel(n: int) -> HalinGraph:
    """The wheel W_n: centre 0, rim 1..n."""
    return build_halin(star_tree(n), HalinKind.STRICT)


# ============================================================================
# STRUCTURAL QUERIES
# ============================================================================

def bipartition(g: Graph) -> TwoColoring:
    """
    Two-colour a connected graph, or return an odd cycle.

    The BFS tree from the smallest vertex assigns colours by depth parity; a
    monochromatic edge closes an odd cycle through the two tree paths.

    Raises:
        InputError: If g is disconnected
    """
    nxg = to_networkx(g)
    if g.vertex_count == 0 or not nx.is_connected(nxg):
        logger.error("bipartition called on a disconnected graph")
        raise InputError("graph is disconnected")

    root = g.vertices[0]
    parent = dict(nx.bfs_predecessors(nxg, root))
    depth = nx.single_source_shortest_path_length(nxg, root)

    for u, v in g.edges:
        if depth[u] % 2 != depth[v] % 2:
            continue
        up = _tree_path(parent, u)
        vp = _tree_path(parent, v)
        while len(up) > 1 and len(vp) > 1 and up[-2] == vp[-2]:
            up.pop()
            vp.pop()
        # up and vp now end at their lowest common ancestor
        cycle = tuple(up) + tuple(reversed(vp[:-1]))
        logger.debug(f"Odd cycle witness of length {len(cycle)}")
        return TwoColoring(odd_cycle=cycle)

    return TwoColoring(colors={v: depth[v] % 2 for v in g.vertices})


def _tree_path(parent: Dict[int, int], v: int) -> List[int]:
    path = [v]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    return path


def degeneracy_ordering(g: Graph, bound: int, last: Optional[int] = None) -> DegeneracyOrdering:
    """
    Order the vertices so each has at most `bound` earlier neighbours.

    Vertices are peeled from the back: the peeled vertex is always the
    smallest id whose remaining degree is within bound, except that `last`
    is peeled first when given.

    Raises:
        InputError: If no such ordering exists (or `last` cannot go last)
    """
    if g.vertex_count and max(nx.core_number(to_networkx(g)).values()) > bound:
        logger.error(f"Graph is not {bound}-degenerate")
        raise InputError(f"graph is not {bound}-degenerate")

    remaining = {v: set(g.neighbours[v]) for v in g.vertices}
    peeled: List[int] = []
    if last is not None:
        if last not in remaining:
            raise InputError(f"vertex {last} is not in the graph")
        if len(remaining[last]) > bound:
            logger.error(f"Vertex {last} has degree {len(remaining[last])} > {bound}")
            raise InputError(f"vertex {last} cannot be placed last with bound {bound}")
        _peel(remaining, last)
        peeled.append(last)

    while remaining:
        v = min(u for u, ns in remaining.items() if len(ns) <= bound)
        _peel(remaining, v)
        peeled.append(v)

    return ordering_from_sequence(g, list(reversed(peeled)), bound)


def _peel(remaining: Dict[int, Set[int]], v: int) -> None:
    for u in remaining.pop(v):
        remaining[u].discard(v)


def ordering_from_sequence(g: Graph, order: Sequence[int], bound: int) -> DegeneracyOrdering:
    """Recount back-degrees of an explicit order and check them against bound."""
    if sorted(order) != list(g.vertices):
        raise InputError("order is not a permutation of the vertices")
    position = {v: i for i, v in enumerate(order)}
    back = tuple(sum(1 for u in g.neighbours[v] if position[u] < position[v]) for v in order)
    try:
        return DegeneracyOrdering(order=tuple(order), back_degrees=back, bound=bound)
    except ValidationError as e:
        raise InputError(f"order violates back-degree bound {bound}") from e


def find_odd_balloons(
    g: Graph,
    root: int,
    forbidden_edges: Iterable[Edge] = (),
    count: int = 1,
) -> List[Balloon]:
    """
    Greedily collect edge-disjoint odd balloons rooted at `root`.

    Each round grows a BFS tree from root in the unused, non-forbidden edges
    and closes an odd cycle with the shallowest non-tree edge whose ends
    share a depth. Its edges are then removed for the next round.

    Returns:
        Up to `count` balloons; an empty list is a valid answer
    """
    available = set(g.edges) - {canonical_edge(*e) for e in forbidden_edges}
    balloons: List[Balloon] = []
    while len(balloons) < count:
        balloon = _shortest_odd_balloon(available, root)
        if balloon is None:
            break
        balloons.append(balloon)
        available -= set(balloon.edges)
    logger.debug(f"Found {len(balloons)}/{count} odd balloons at root {root}")
    return balloons


def _shortest_odd_balloon(edges: Set[Edge], root: int) -> Optional[Balloon]:
    nxg = nx.Graph()
    nxg.add_node(root)
    nxg.add_edges_from(sorted(edges))
    parent = dict(nx.bfs_predecessors(nxg, root))
    depth = nx.single_source_shortest_path_length(nxg, root)

    best: Optional[Tuple[int, Edge]] = None
    for u, v in sorted(edges):
        if u not in depth or v not in depth or depth[u] != depth[v]:
            continue
        # same depth in a BFS tree: the tree paths meet, closing an odd cycle
        if best is None or depth[u] < best[0]:
            best = (depth[u], (u, v))
    if best is None:
        return None

    u, v = best[1]
    up = _tree_path(parent, u)
    vp = _tree_path(parent, v)
    while len(up) > 1 and len(vp) > 1 and up[-2] == vp[-2]:
        up.pop()
        vp.pop()
    apex = up[-1]
    stem = _tree_path(parent, apex)
    cycle = tuple(reversed(up)) + tuple(vp[:-1])
    return Balloon(path_vertices=tuple(reversed(stem)), cycle_vertices=cycle)


# ============================================================================
# GENERATORS
# ============================================================================

def random_plane_tree(leaf_count: int, allow_degree2: bool = False, seed: int = 0) -> PlaneTree:
    """
    Seeded random plane tree with exactly `leaf_count` leaves.

    The root starts with three leaf children; random leaves then sprout two
    or three children until the leaf count is met. With allow_degree2 a
    random number of tree edges are subdivided afterwards. Vertices are
    relabelled 0..n-1 in preorder.

    Raises:
        InputError: If leaf_count < 3
    """
    if leaf_count < 3:
        logger.error(f"random_plane_tree: leaf_count {leaf_count} < 3")
        raise InputError(f"leaf_count must be at least 3, got {leaf_count}")
    rng = random.Random(seed)

    children: Dict[int, List[int]] = {0: [1, 2, 3]}
    next_id = 4
    leaves = [1, 2, 3]
    while len(leaves) < leaf_count:
        grow = rng.choice((2, 3)) if leaf_count - len(leaves) >= 2 else 2
        v = rng.choice(leaves)
        kids = list(range(next_id, next_id + grow))
        next_id += grow
        children[v] = kids
        i = leaves.index(v)
        leaves[i:i + 1] = kids

    if allow_degree2:
        tree_edges = [(p, c) for p, cs in children.items() for c in cs]
        for p, c in rng.sample(tree_edges, rng.randint(0, len(tree_edges) // 2)):
            cs = children[p]
            cs[cs.index(c)] = next_id
            children[next_id] = [c]
            next_id += 1

    return _relabel_preorder(PlaneTree(root=0, children={k: tuple(v) for k, v in children.items()}))


def _relabel_preorder(tree: PlaneTree) -> PlaneTree:
    label = {v: i for i, v in enumerate(tree.preorder)}
    return PlaneTree(
        root=label[tree.root],
        children={label[v]: tuple(label[c] for c in cs) for v, cs in tree.children.items()},
    )


@lru_cache(maxsize=None)
def _forests(size: int) -> Tuple[Tuple[tuple, ...], ...]:
    """All ordered forests with `size` vertices as tuples of subtree shapes."""
    if size == 0:
        return ((),)
    out: List[Tuple[tuple, ...]] = []
    for first in range(1, size + 1):
        for head in _forests(first - 1):
            for tail in _forests(size - first):
                out.append((head,) + tail)
    return tuple(out)


def _shape_to_tree(shape: Tuple[tuple, ...]) -> PlaneTree:
    children: Dict[int, Tuple[int, ...]] = {}
    counter = [0]

    def place(sub: Tuple[tuple, ...]) -> int:
        v = counter[0]
        counter[0] += 1
        children[v] = tuple(place(s) for s in sub)
        return v

    place(shape)
    return PlaneTree(root=0, children=children)


def enumerate_plane_trees(vertex_count: int, allow_degree2: bool = True) -> Iterator[PlaneTree]:
    """
    Every rooted plane tree on `vertex_count` vertices usable as a Halin skeleton.

    Trees are labelled 0..n-1 in preorder, have a non-leaf root and at least
    three leaves; with allow_degree2 False internal degree-2 vertices are
    skipped as well.
    """
    if vertex_count < 4:
        return
    for shape in _forests(vertex_count - 1):
        if len(shape) < 2:
            continue
        tree = _shape_to_tree(shape)
        if len(tree.leaves) < 3:
            continue
        if not allow_degree2 and any(tree.tree_degree(v) == 2 for v in tree.vertices):
            continue
        yield tree
