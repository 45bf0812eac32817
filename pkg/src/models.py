"""
Halin Weight Certifier - Data Models

CONTEXT:
This module defines all Pydantic models used by the certifier. These models
provide type safety, validation, and serialization for:
- Graphs, plane trees and generalized Halin graphs
- Orientations, index functions and symbolic (linear combination) columns
- Certificates and the bipartite partition / edge assignment plans
- List assignments and total weightings

ELEMENT CONVENTIONS:
- A vertex is an int, an edge is a canonical pair (u, v) with u < v.
- "Element" means vertex or edge. Canonical element order lists all edges in
  sorted order followed by all vertices in sorted order.
- JSON documents write an edge key as "u-v".

DEPENDENCIES:
- pydantic: Data validation and serialization
- numpy: Coefficient matrix storage
- fractions: Exact rational weights

USAGE:
    from src.models import Graph, PlaneTree, HalinGraph

    tree = PlaneTree(root=0, children={0: (1, 2, 3)})
    halin = HalinGraph(tree=tree, kind=HalinKind.STRICT)
    print(halin.graph.edge_count)   # 6: the wheel W_3
"""

from __future__ import annotations

import re
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

Edge = Tuple[int, int]
Element = Union[int, Edge]

_EDGE_KEY = re.compile(r"^\s*(-?\d+)\s*-\s*(-?\d+)\s*$")


def canonical_edge(u: int, v: int) -> Edge:
    """Return the edge uv with its endpoints in id order."""
    return (u, v) if u < v else (v, u)


def edge_key(e: Edge) -> str:
    return f"{e[0]}-{e[1]}"


def parse_edge_key(key: Union[str, Iterable[int]]) -> Edge:
    """Parse "u-v" (or a 2-sequence) into a canonical edge."""
    if isinstance(key, str):
        match = _EDGE_KEY.match(key)
        if match is None:
            raise ValueError(f"malformed edge key {key!r}")
        u, v = int(match.group(1)), int(match.group(2))
    else:
        u, v = (int(x) for x in key)
    if u == v:
        raise ValueError(f"loop edge {key!r}")
    return canonical_edge(u, v)


def is_edge(z: Element) -> bool:
    return isinstance(z, tuple)


def element_sort_key(z: Element) -> Tuple[int, Tuple[int, ...]]:
    """Edges before vertices, each group in id order."""
    return (0, z) if isinstance(z, tuple) else (1, (z,))


def _parse_edge_dict(value: Any) -> Any:
    if isinstance(value, dict):
        return {parse_edge_key(k) if isinstance(k, str) else canonical_edge(*k): v
                for k, v in value.items()}
    return value


def _to_fraction(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _fraction_out(x: Fraction) -> Union[int, str]:
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ============================================================================
# ENUMS
# ============================================================================

class HalinKind(str, Enum):
    """Strict Halin graphs forbid internal tree vertices of degree 2."""
    STRICT = "strict"
    GENERALIZED = "generalized"


class Provenance(str, Enum):
    """Which construction produced a certificate."""
    NONBIP_EVEN_LEAVES = "nonbip-even-leaves"
    NONBIP_ODD_K_EVEN = "nonbip-odd-k-even"
    NONBIP_ODD_K_ODD = "nonbip-odd-k-odd"
    WHEEL_SMALL = "wheel-small"
    WHEEL_LARGE = "wheel-large"
    BIP_CASE1_TWO_SONS = "bip-case1-two-sons"
    BIP_CASE1_THREE_SONS = "bip-case1-three-sons"
    BIP_CASE2 = "bip-case2"
    BIP_CASE3 = "bip-case3"
    SEARCH = "search"


class OrientationCase(str, Enum):
    """Orientation recipes for non-bipartite generalized Halin graphs."""
    EVEN_LEAVES = "even-leaves"
    ODD_K_EVEN = "odd-k-even"
    ODD_K_ODD = "odd-k-odd"


class BipartiteCase(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"


# ============================================================================
# GRAPH MODELS
# ============================================================================

class Graph(BaseModel):
    """
    Undirected simple graph.

    Attributes:
        vertices: Vertex ids in increasing order
        edges: Canonical edges in increasing order
    """
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[int, ...] = Field(..., description="Sorted vertex ids")
    edges: Tuple[Edge, ...] = Field(default=(), description="Sorted canonical edges")

    @field_validator("edges", mode="before")
    @classmethod
    def _parse_edges(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return tuple(parse_edge_key(e) for e in value)
        return value

    @model_validator(mode="after")
    def _check_simple(self) -> "Graph":
        if list(self.vertices) != sorted(set(self.vertices)):
            raise ValueError("vertex ids must be distinct and sorted")
        if list(self.edges) != sorted(set(self.edges)):
            raise ValueError("edges must be distinct and sorted")
        known = set(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if u not in known or v not in known:
                raise ValueError(f"edge {u}-{v} has an unknown endpoint")
        return self

    @cached_property
    def incidence(self) -> Dict[int, Tuple[Edge, ...]]:
        """E(v): edges incident to each vertex, in canonical order."""
        table: Dict[int, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table[e[0]].append(e)
            table[e[1]].append(e)
        return {v: tuple(es) for v, es in table.items()}

    @cached_property
    def neighbours(self) -> Dict[int, Tuple[int, ...]]:
        return {v: tuple(sorted(u if w == v else w for u, w in es))
                for v, es in self.incidence.items()}

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and canonical_edge(u, v) in self.edge_set

    def elements(self) -> Tuple[Element, ...]:
        """Canonical element order: edges, then vertices."""
        return tuple(self.edges) + tuple(self.vertices)

    def edge_subgraph(self, edges: Iterable[Edge]) -> "Graph":
        """Subgraph formed by the given edges and their endpoints."""
        chosen = sorted(set(canonical_edge(*e) for e in edges))
        verts = sorted({x for e in chosen for x in e})
        return Graph(vertices=tuple(verts), edges=tuple(chosen))

    def induced(self, vertices: Iterable[int]) -> "Graph":
        keep = set(vertices)
        return Graph(
            vertices=tuple(sorted(keep)),
            edges=tuple(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def without_vertex(self, v: int) -> "Graph":
        return self.induced(x for x in self.vertices if x != v)


class PlaneTree(BaseModel):
    """
    Rooted plane tree.

    The stored child order is the plane embedding: reading leaves in
    depth-first preorder gives the cyclic leaf order of the Halin closure.

    Attributes:
        root: Root vertex id
        children: Ordered child list per vertex (vertices without children may be omitted)
    """
    model_config = ConfigDict(frozen=True)

    root: int = Field(..., description="Root vertex id")
    children: Dict[int, Tuple[int, ...]] = Field(default_factory=dict)

    @field_validator("children", mode="before")
    @classmethod
    def _drop_empty(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {int(k): tuple(int(c) for c in v) for k, v in value.items() if len(v) > 0}
        return value

    @model_validator(mode="after")
    def _check_tree(self) -> "PlaneTree":
        seen = {self.root}
        stack = [self.root]
        while stack:
            v = stack.pop()
            for c in self.children.get(v, ()):
                if c in seen:
                    raise ValueError(f"vertex {c} has more than one parent or closes a cycle")
                seen.add(c)
                stack.append(c)
        stray = set(self.children) - seen
        if stray:
            raise ValueError(f"vertices {sorted(stray)} are not reachable from the root")
        return self

    @cached_property
    def parent(self) -> Dict[int, Optional[int]]:
        table: Dict[int, Optional[int]] = {self.root: None}
        for v, cs in self.children.items():
            for c in cs:
                table[c] = v
        return table

    @cached_property
    def preorder(self) -> Tuple[int, ...]:
        order: List[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children.get(v, ())))
        return tuple(order)

    @cached_property
    def depth(self) -> Dict[int, int]:
        table = {self.root: 0}
        for v in self.preorder:
            for c in self.children.get(v, ()):
                table[c] = table[v] + 1
        return table

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.preorder))

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(canonical_edge(v, c)
                            for v, cs in self.children.items() for c in cs))

    def sons(self, v: int) -> Tuple[int, ...]:
        return self.children.get(v, ())

    def tree_degree(self, v: int) -> int:
        return len(self.sons(v)) + (0 if v == self.root else 1)

    @cached_property
    def leaves(self) -> Tuple[int, ...]:
        """Tree-degree-1 vertices in depth-first preorder."""
        if len(self.preorder) == 1:
            return ()
        return tuple(v for v in self.preorder if self.tree_degree(v) == 1)

    def rotation(self, v: int) -> Tuple[int, ...]:
        """Cyclic neighbour order of v in the embedding."""
        p = self.parent[v]
        return ((p,) if p is not None else ()) + self.sons(v)

    def descendants(self, v: int) -> Tuple[int, ...]:
        out: List[int] = []
        stack = list(reversed(self.sons(v)))
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.sons(u)))
        return tuple(out)

    def reroot(self, new_root: int) -> "PlaneTree":
        """Same embedded tree hung from another vertex."""
        if new_root not in self.parent:
            raise ValueError(f"{new_root} is not a vertex of the tree")
        children: Dict[int, Tuple[int, ...]] = {}
        stack: List[Tuple[int, Optional[int]]] = [(new_root, None)]
        while stack:
            v, p = stack.pop()
            rot = self.rotation(v)
            if p is None:
                kids = rot
            else:
                i = rot.index(p)
                kids = rot[i + 1:] + rot[:i]
            children[v] = kids
            stack.extend((c, v) for c in kids)
        return PlaneTree(root=new_root, children=children)


class HalinGraph(BaseModel):
    """
    Plane tree plus the cycle through its leaves in plane order.

    Attributes:
        tree: The plane tree T
        kind: strict (no internal degree-2 vertices) or generalized
    """
    model_config = ConfigDict(frozen=True)

    tree: PlaneTree
    kind: HalinKind = HalinKind.GENERALIZED

    @model_validator(mode="after")
    def _check_halin(self) -> "HalinGraph":
        if len(self.tree.leaves) < 3:
            raise ValueError(f"a Halin graph needs at least 3 leaves, tree has {len(self.tree.leaves)}")
        if self.kind == HalinKind.STRICT:
            for v in self.tree.vertices:
                if self.tree.tree_degree(v) == 2:
                    raise ValueError(f"strict Halin graph: internal vertex {v} has degree 2")
        return self

    @cached_property
    def cycle(self) -> Tuple[int, ...]:
        return self.tree.leaves

    @cached_property
    def cycle_edges(self) -> Tuple[Edge, ...]:
        c = self.cycle
        return tuple(canonical_edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))

    @cached_property
    def graph(self) -> Graph:
        edges = sorted(set(self.tree.edges) | set(self.cycle_edges))
        return Graph(vertices=self.tree.vertices, edges=tuple(edges))

    @property
    def is_wheel(self) -> bool:
        return len(self.tree.vertices) == len(self.cycle) + 1

    def to_document(self) -> Dict[str, Any]:
        """Graph/Halin JSON document; the cycle is never stored."""
        return {
            "vertices": list(self.graph.vertices),
            "edges": [list(e) for e in self.graph.edges],
            "tree": {
                "root": self.tree.root,
                "children": {str(v): list(cs) for v, cs in sorted(self.tree.children.items())},
            },
            "kind": self.kind.value,
        }

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "HalinGraph":
        halin = cls(tree=PlaneTree(**doc["tree"]), kind=HalinKind(doc.get("kind", "generalized")))
        if "edges" in doc:
            stated = {parse_edge_key(e) for e in doc["edges"]}
            if stated != set(halin.graph.edges):
                raise ValueError("stored edge list disagrees with the tree closure")
        return halin


class TwoColoring(BaseModel):
    """Either a proper 2-colouring or an odd cycle proving none exists."""
    model_config = ConfigDict(frozen=True)

    colors: Optional[Dict[int, int]] = None
    odd_cycle: Optional[Tuple[int, ...]] = None

    @property
    def is_bipartite(self) -> bool:
        return self.colors is not None

    def side(self, color: int) -> Tuple[int, ...]:
        if self.colors is None:
            return ()
        return tuple(sorted(v for v, c in self.colors.items() if c == color))


class Balloon(BaseModel):
    """
    A path v_1..v_k attached at v_k = u_1 to a cycle u_1..u_m.

    The root is v_1; a single-vertex path makes the balloon a plain cycle.
    """
    model_config = ConfigDict(frozen=True)

    path_vertices: Tuple[int, ...]
    cycle_vertices: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "Balloon":
        if not self.path_vertices or len(self.cycle_vertices) < 3:
            raise ValueError("balloon needs a non-empty path and a cycle of length >= 3")
        if self.path_vertices[-1] != self.cycle_vertices[0]:
            raise ValueError("path must end at the first cycle vertex")
        if len(set(self.cycle_vertices)) != len(self.cycle_vertices):
            raise ValueError("cycle repeats a vertex")
        if len(set(self.path_vertices)) != len(self.path_vertices):
            raise ValueError("path repeats a vertex")
        if set(self.path_vertices[:-1]) & set(self.cycle_vertices):
            raise ValueError("path meets the cycle before its end")
        return self

    @property
    def root(self) -> int:
        return self.path_vertices[0]

    @property
    def odd(self) -> bool:
        return len(self.cycle_vertices) % 2 == 1

    @property
    def path_edges(self) -> Tuple[Edge, ...]:
        p = self.path_vertices
        return tuple(canonical_edge(p[i], p[i + 1]) for i in range(len(p) - 1))

    @property
    def cycle_edges(self) -> Tuple[Edge, ...]:
        c = self.cycle_vertices
        return tuple(canonical_edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self.path_edges + self.cycle_edges


class DegeneracyOrdering(BaseModel):
    """Vertex order with back-degrees d_i (earlier neighbours)."""
    model_config = ConfigDict(frozen=True)

    order: Tuple[int, ...]
    back_degrees: Tuple[int, ...]
    bound: int

    @model_validator(mode="after")
    def _check_bound(self) -> "DegeneracyOrdering":
        if len(self.order) != len(self.back_degrees):
            raise ValueError("order and back_degrees differ in length")
        if any(d > self.bound for d in self.back_degrees):
            raise ValueError(f"back-degree exceeds bound {self.bound}")
        return self

    def as_dict(self) -> Dict[int, int]:
        return dict(zip(self.order, self.back_degrees))


# ============================================================================
# ALGEBRA MODELS
# ============================================================================

class Orientation(BaseModel):
    """Direction (tail, head) for each edge."""
    model_config = ConfigDict(frozen=True)

    arcs: Tuple[Tuple[int, int], ...]

    @model_validator(mode="after")
    def _check_unique(self) -> "Orientation":
        keys = [canonical_edge(*a) for a in self.arcs]
        if len(keys) != len(set(keys)):
            raise ValueError("an edge is oriented more than once")
        return self

    @classmethod
    def from_map(cls, heads: Dict[Edge, int]) -> "Orientation":
        """Build from {edge: head vertex}."""
        arcs = []
        for e in sorted(heads):
            h = heads[e]
            if h not in e:
                raise ValueError(f"head {h} is not an endpoint of {edge_key(e)}")
            arcs.append((e[0] if h == e[1] else e[1], h))
        return cls(arcs=tuple(arcs))

    @cached_property
    def heads(self) -> Dict[Edge, int]:
        return {canonical_edge(t, h): h for t, h in self.arcs}

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.heads))

    def head(self, e: Edge) -> int:
        return self.heads[e]

    def tail(self, e: Edge) -> int:
        h = self.heads[e]
        return e[0] if h == e[1] else e[1]

    def out_degree(self, v: int) -> int:
        return sum(1 for t, _ in self.arcs if t == v)

    def out_degrees(self) -> Dict[int, int]:
        table: Dict[int, int] = {}
        for t, _ in self.arcs:
            table[t] = table.get(t, 0) + 1
        return table

    def reverse(self, e: Edge) -> "Orientation":
        heads = dict(self.heads)
        heads[e] = self.tail(e)
        return Orientation.from_map(heads)

    def restrict(self, edges: Iterable[Edge]) -> "Orientation":
        keep = set(edges)
        return Orientation.from_map({e: h for e, h in self.heads.items() if e in keep})


class IndexFunction(BaseModel):
    """
    Map z -> eta(z) >= 0 over vertices and edges (zero entries are dropped).

    Valid for a graph G when the values sum to |E(G)|.
    """
    model_config = ConfigDict(frozen=True)

    vertices: Dict[int, int] = Field(default_factory=dict)
    edges: Dict[Edge, int] = Field(default_factory=dict)

    @field_validator("edges", mode="before")
    @classmethod
    def _parse_keys(cls, value: Any) -> Any:
        return _parse_edge_dict(value)

    @model_validator(mode="after")
    def _normalise(self) -> "IndexFunction":
        for z, n in list(self.vertices.items()) + list(self.edges.items()):
            if n < 0:
                raise ValueError(f"negative index {n} at {z}")
        object.__setattr__(self, "vertices", {v: n for v, n in sorted(self.vertices.items()) if n})
        object.__setattr__(self, "edges", {e: n for e, n in sorted(self.edges.items()) if n})
        return self

    @field_serializer("edges")
    def _edge_keys(self, value: Dict[Edge, int]) -> Dict[str, int]:
        return {edge_key(e): n for e, n in value.items()}

    @field_serializer("vertices")
    def _vertex_keys(self, value: Dict[int, int]) -> Dict[str, int]:
        return {str(v): n for v, n in value.items()}

    @classmethod
    def from_elements(cls, values: Dict[Element, int]) -> "IndexFunction":
        return cls(
            vertices={z: n for z, n in values.items() if not is_edge(z)},
            edges={z: n for z, n in values.items() if is_edge(z)},
        )

    def __getitem__(self, z: Element) -> int:
        if is_edge(z):
            return self.edges.get(z, 0)
        return self.vertices.get(z, 0)

    def items(self) -> List[Tuple[Element, int]]:
        """Non-zero entries in canonical element order."""
        pairs: List[Tuple[Element, int]] = list(self.edges.items()) + list(self.vertices.items())
        return sorted(pairs, key=lambda p: element_sort_key(p[0]))

    def total(self) -> int:
        return sum(self.vertices.values()) + sum(self.edges.values())

    def is_valid_for(self, g: Graph) -> bool:
        return self.total() == g.edge_count and self.is_supported_on(g)

    def is_supported_on(self, g: Graph) -> bool:
        return set(self.vertices) <= set(g.vertices) and set(self.edges) <= g.edge_set

    def max_vertex(self) -> int:
        return max(self.vertices.values(), default=0)

    def max_edge(self) -> int:
        return max(self.edges.values(), default=0)

    def merged(self, other: "IndexFunction") -> "IndexFunction":
        """Pointwise sum."""
        values: Dict[Element, int] = dict(self.items())
        for z, n in other.items():
            values[z] = values.get(z, 0) + n
        return IndexFunction.from_elements(values)


class SymbolicColumn(BaseModel):
    """Integral linear combination of base columns of A_G."""
    model_config = ConfigDict(frozen=True)

    combo: Dict[Union[Edge, int], int]

    @model_validator(mode="after")
    def _drop_zero(self) -> "SymbolicColumn":
        clean = {z: c for z, c in self.combo.items() if c != 0}
        if not clean:
            raise ValueError("symbolic column has no non-zero coefficient")
        object.__setattr__(self, "combo", dict(sorted(clean.items(), key=lambda p: element_sort_key(p[0]))))
        return self

    @classmethod
    def pure(cls, z: Element) -> "SymbolicColumn":
        return cls(combo={z: 1})

    @property
    def is_pure(self) -> bool:
        return len(self.combo) == 1 and next(iter(self.combo.values())) == 1

    @property
    def element(self) -> Element:
        if not self.is_pure:
            raise ValueError("column is a proper combination")
        return next(iter(self.combo))

    @property
    def only_edges(self) -> bool:
        return all(is_edge(z) for z in self.combo)


class CoefficientMatrix(BaseModel):
    """
    The full matrix A_G: rows are edges, columns are edges then vertices.

    Attributes:
        graph: Host graph
        orientation: Orientation used for the signs
        values: Dense integer array of shape (|E|, |E| + |V|)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    graph: Graph
    orientation: Orientation
    values: np.ndarray

    @property
    def rows(self) -> Tuple[Edge, ...]:
        return self.graph.edges

    @cached_property
    def columns(self) -> Tuple[Element, ...]:
        return self.graph.elements()

    @cached_property
    def column_index(self) -> Dict[Element, int]:
        return {z: i for i, z in enumerate(self.columns)}

    def column(self, z: Element) -> np.ndarray:
        return self.values[:, self.column_index[z]]

    def combine(self, col: SymbolicColumn) -> np.ndarray:
        out = np.zeros(len(self.rows), dtype=np.int64)
        for z, c in col.combo.items():
            out += c * self.column(z)
        return out


class WeightMatrix(BaseModel):
    """A_G(eta): column A_G(z) repeated eta(z) times."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: CoefficientMatrix
    eta: IndexFunction

    @property
    def is_square(self) -> bool:
        return self.eta.total() == len(self.base.rows)

    def is_ab_matrix(self, a: int, b: int) -> bool:
        return self.eta.max_vertex() <= a and self.eta.max_edge() <= b

    @cached_property
    def column_elements(self) -> Tuple[Element, ...]:
        return tuple(z for z, n in self.eta.items() for _ in range(n))

    def grouped(self) -> Tuple[np.ndarray, List[int]]:
        """Distinct columns (as a matrix) and their multiplicities."""
        items = self.eta.items()
        if not items:
            return np.zeros((len(self.base.rows), 0), dtype=np.int64), []
        cols = np.stack([self.base.column(z) for z, _ in items], axis=1)
        return cols, [n for _, n in items]

    def dense(self) -> np.ndarray:
        if not self.column_elements:
            return np.zeros((len(self.base.rows), 0), dtype=np.int64)
        return np.stack([self.base.column(z) for z in self.column_elements], axis=1)


class EulerianCount(BaseModel):
    """|EE(D)| and |EO(D)|."""
    model_config = ConfigDict(frozen=True)

    even_count: int = Field(..., ge=0)
    odd_count: int = Field(..., ge=0)

    @property
    def difference(self) -> int:
        return self.even_count - self.odd_count


class PolynomialOracleResult(BaseModel):
    """Expanded P_G (or Q_G): exponent vector over `elements` -> coefficient."""
    model_config = ConfigDict(frozen=True)

    elements: Tuple[Union[Edge, int], ...]
    coefficients: Dict[Tuple[int, ...], int]

    def coefficient(self, eta: IndexFunction) -> int:
        exponents = tuple(eta[z] for z in self.elements)
        return self.coefficients.get(exponents, 0)


# ============================================================================
# CERTIFICATE MODELS
# ============================================================================

class Certificate(BaseModel):
    """
    Permanent-non-singular (0,2)-matrix witness.

    Attributes:
        eta: Edge-only index function with eta(e) <= 2
        permanent: Exact per(A_G(eta)) under the canonical orientation
        provenance: Construction that produced eta
        aux: Case-specific data (orientation, balloons, partition, assignment)
    """
    model_config = ConfigDict(frozen=True)

    eta: IndexFunction
    permanent: int
    provenance: Provenance
    aux: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("permanent", mode="before")
    @classmethod
    def _parse_permanent(cls, value: Any) -> Any:
        return int(value) if isinstance(value, str) else value

    @field_serializer("permanent")
    def _permanent_text(self, value: int) -> str:
        return str(value)


class VerificationReport(BaseModel):
    ok: bool
    reason: Optional[str] = None
    permanent: Optional[int] = None


class PartitionPlan(BaseModel):
    """
    V = X u Y split used by the bipartite construction.

    Attributes:
        case: Which case produced the split
        root: Root of the tree used for depths
        x: Vertices of X
        y: Vertices of Y
        e_x: Edges inside X
        e_xy: Crossing edges E[X, Y]
        anchors: Named vertices of the case analysis (v1, v2, v3, v4, w, hub, ...)
        sons: Number of sons of the hub (Case 1 distinguishes two and three)
    """
    model_config = ConfigDict(frozen=True)

    case: BipartiteCase
    root: int
    x: Tuple[int, ...]
    y: Tuple[int, ...]
    e_x: Tuple[Edge, ...]
    e_xy: Tuple[Edge, ...]
    anchors: Dict[str, int] = Field(default_factory=dict)
    sons: int = 0

    @model_validator(mode="after")
    def _check_partition(self) -> "PartitionPlan":
        if set(self.x) & set(self.y):
            raise ValueError("X and Y intersect")
        return self

    @property
    def h_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(set(self.e_x) | set(self.e_xy)))


class EdgeAssignment(BaseModel):
    """phi: E[X] u E[X,Y] -> E[X] together with the orientation of H."""
    model_config = ConfigDict(frozen=True)

    phi: Dict[Edge, Edge]
    orientation: Orientation

    def preimage_sizes(self) -> Dict[Edge, int]:
        sizes: Dict[Edge, int] = {}
        for target in self.phi.values():
            sizes[target] = sizes.get(target, 0) + 1
        return sizes

    def eta(self) -> IndexFunction:
        return IndexFunction(edges=self.preimage_sizes())


# ============================================================================
# WEIGHTING MODELS
# ============================================================================

class ListAssignment(BaseModel):
    """
    Permissible weights per vertex and edge.

    Lists are stored sorted and deduplicated as exact fractions.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: Dict[int, Tuple[Fraction, ...]] = Field(default_factory=dict)
    edges: Dict[Edge, Tuple[Fraction, ...]] = Field(default_factory=dict)

    @field_validator("vertices", mode="before")
    @classmethod
    def _parse_vertex_lists(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {int(k): tuple(sorted({_to_fraction(x) for x in v})) for k, v in value.items()}
        return value

    @field_validator("edges", mode="before")
    @classmethod
    def _parse_edge_lists(cls, value: Any) -> Any:
        value = _parse_edge_dict(value)
        if isinstance(value, dict):
            return {k: tuple(sorted({_to_fraction(x) for x in v})) for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _non_empty(self) -> "ListAssignment":
        for z, lst in list(self.vertices.items()) + list(self.edges.items()):
            if not lst:
                raise ValueError(f"empty list at {z}")
        return self

    @field_serializer("vertices")
    def _vertices_out(self, value: Dict[int, Tuple[Fraction, ...]]) -> Dict[str, List[Any]]:
        return {str(v): [_fraction_out(x) for x in lst] for v, lst in sorted(value.items())}

    @field_serializer("edges")
    def _edges_out(self, value: Dict[Edge, Tuple[Fraction, ...]]) -> Dict[str, List[Any]]:
        return {edge_key(e): [_fraction_out(x) for x in lst] for e, lst in sorted(value.items())}

    @classmethod
    def uniform(cls, g: Graph, vertex_list: Iterable[Any], edge_list: Iterable[Any]) -> "ListAssignment":
        vl = tuple(vertex_list)
        el = tuple(edge_list)
        return cls(vertices={v: vl for v in g.vertices}, edges={e: el for e in g.edges})

    def __getitem__(self, z: Element) -> Tuple[Fraction, ...]:
        return self.edges[z] if is_edge(z) else self.vertices[z]

    def covers(self, g: Graph) -> bool:
        return set(g.vertices) <= set(self.vertices) and g.edge_set <= set(self.edges)

    def shape(self, g: Graph) -> Tuple[int, int]:
        """(min vertex list size, min edge list size) over g."""
        kv = min((len(self.vertices[v]) for v in g.vertices), default=0)
        ke = min((len(self.edges[e]) for e in g.edges), default=0)
        return kv, ke


class TotalWeighting(BaseModel):
    """phi: V u E -> Q."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: Dict[int, Fraction] = Field(default_factory=dict)
    edges: Dict[Edge, Fraction] = Field(default_factory=dict)

    @field_validator("vertices", mode="before")
    @classmethod
    def _parse_vertex_weights(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {int(k): _to_fraction(x) for k, x in value.items()}
        return value

    @field_validator("edges", mode="before")
    @classmethod
    def _parse_edge_weights(cls, value: Any) -> Any:
        value = _parse_edge_dict(value)
        if isinstance(value, dict):
            return {k: _to_fraction(x) for k, x in value.items()}
        return value

    @field_serializer("vertices")
    def _vertices_out(self, value: Dict[int, Fraction]) -> Dict[str, Any]:
        return {str(v): _fraction_out(x) for v, x in sorted(value.items())}

    @field_serializer("edges")
    def _edges_out(self, value: Dict[Edge, Fraction]) -> Dict[str, Any]:
        return {edge_key(e): _fraction_out(x) for e, x in sorted(value.items())}

    @classmethod
    def from_elements(cls, values: Dict[Element, Any]) -> "TotalWeighting":
        return cls(
            vertices={z: x for z, x in values.items() if not is_edge(z)},
            edges={z: x for z, x in values.items() if is_edge(z)},
        )

    def __getitem__(self, z: Element) -> Fraction:
        return self.edges[z] if is_edge(z) else self.vertices[z]

    def get(self, z: Element) -> Optional[Fraction]:
        return self.edges.get(z) if is_edge(z) else self.vertices.get(z)


class ProperCheck(BaseModel):
    """Result of a properness check."""
    proper: bool
    violating_edge: Optional[Edge] = None


class ChoosabilityReport(BaseModel):
    """Outcome of the finite (k,k')-list family check."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    passed: bool
    checked: int
    counterexample: Optional[ListAssignment] = None
