"""
Halin Weight Certifier - Matrix Tools

CONTEXT:
This module implements the column algebra behind every certificate:
- build_coefficient_matrix / canonical_orientation: the matrix A_G
- assemble: the square column-multiset matrix A_G(eta)
- permanent_exact / permanent_mod: Ryser permanents over grouped columns
- coefficient_from_permanent: c_eta = per(A_G(eta)) / prod eta(z)!
- balloon_combination / path_combination: edge-column identities
- expand_to_edge_columns: multilinear branch-and-prune to pure edge columns

PERMANENT KERNEL:
Identical columns are grouped, so a matrix with distinct columns c_j of
multiplicities m_j costs prod (m_j + 1) Ryser terms:

    per = sum_k (-1)^(n - |k|) prod_j C(m_j, k_j) prod_rows (sum_j k_j c_j)

Terms are split into a low block (tabulated once as rowsum vectors) and a
high block (looped), and every product is reduced modulo a prime in int64.
Exact values are recovered by CRT over enough 31-bit primes to exceed twice
the row-sum bound on |per|.

DEPENDENCIES:
- numpy: Vectorised rowsums and modular products
- sympy: Primality, prime generation and CRT reconstruction
- src.models: Graph, Orientation, CoefficientMatrix, WeightMatrix, SymbolicColumn

USAGE:
    from src.tools.matrix_tools import build_coefficient_matrix, permanent_exact

    base = build_coefficient_matrix(g, canonical_orientation(g))
    print(permanent_exact(assemble(base, eta)))
"""

import itertools
import logging
from math import comb, factorial, prod
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import isprime, prevprime
from sympy.ntheory.modular import crt

from src.config import settings
from src.errors import ConsistencyError, FallbackNeeded, InputError
from src.models import (
    Balloon,
    Certificate,
    CoefficientMatrix,
    Element,
    Graph,
    IndexFunction,
    Orientation,
    Provenance,
    SymbolicColumn,
    WeightMatrix,
    canonical_edge,
    element_sort_key,
    is_edge,
)

logger = logging.getLogger(__name__)

MatrixLike = Union[WeightMatrix, np.ndarray, Sequence[Sequence[int]]]

_CRT_PRIMES: List[int] = []


# ============================================================================
# COEFFICIENT MATRIX
# ============================================================================

def canonical_orientation(g: Graph) -> Orientation:
    """Every edge from its smaller to its larger endpoint."""
    return Orientation(arcs=tuple(g.edges))


def build_coefficient_matrix(g: Graph, d: Optional[Orientation] = None) -> CoefficientMatrix:
    """
    Build A_G for graph g under orientation d.

    Row f = (a -> b): vertex column b is +1 and a is -1; edge column e is the
    sum of its endpoint columns, so edges at b give +1, edges at a give -1
    and the self entry A_G[f, f] is 0.

    Raises:
        InputError: If d does not orient exactly the edges of g
    """
    d = d or canonical_orientation(g)
    if set(d.heads) != g.edge_set:
        missing = sorted(g.edge_set - set(d.heads))
        logger.error(f"Orientation does not match graph edges (missing {missing[:3]})")
        raise InputError(f"orientation does not cover the graph edges: missing {missing}")

    vindex = {v: i for i, v in enumerate(g.vertices)}
    vertex_block = np.zeros((g.edge_count, g.vertex_count), dtype=np.int64)
    incidence = np.zeros((g.vertex_count, g.edge_count), dtype=np.int64)
    for r, e in enumerate(g.edges):
        vertex_block[r, vindex[d.head(e)]] = 1
        vertex_block[r, vindex[d.tail(e)]] = -1
        incidence[vindex[e[0]], r] = 1
        incidence[vindex[e[1]], r] = 1

    values = np.concatenate([vertex_block @ incidence, vertex_block], axis=1)
    return CoefficientMatrix(graph=g, orientation=d, values=values)


def assemble(base: CoefficientMatrix, eta: IndexFunction) -> WeightMatrix:
    """
    Form A_G(eta).

    Raises:
        InputError: If eta is not valid for the base graph
    """
    if not eta.is_supported_on(base.graph):
        logger.error("Index function names elements outside the graph")
        raise InputError("index function names elements outside the graph")
    if eta.total() != base.graph.edge_count:
        logger.error(f"Invalid index function: sum {eta.total()} vs |E| = {base.graph.edge_count}")
        raise InputError(f"index function sums to {eta.total()} but |E| = {base.graph.edge_count}")
    return WeightMatrix(base=base, eta=eta)


def combine_columns(base: CoefficientMatrix, columns: Sequence[SymbolicColumn]) -> np.ndarray:
    """Dense matrix whose j-th column is the j-th symbolic combination."""
    if not columns:
        return np.zeros((len(base.rows), 0), dtype=np.int64)
    return np.stack([base.combine(c) for c in columns], axis=1)


# ============================================================================
# PERMANENTS
# ============================================================================

def _as_grouped(m: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct columns and multiplicities of a square matrix."""
    if isinstance(m, WeightMatrix):
        if not m.is_square:
            raise InputError(f"A_G(eta) is not square: {m.eta.total()} columns, {len(m.base.rows)} rows")
        cols, mults = m.grouped()
        return _merge_identical(cols, np.array(mults, dtype=np.int64))
    arr = np.asarray(m, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"permanent needs a square matrix, got shape {arr.shape}")
    return _merge_identical(arr, np.ones(arr.shape[1], dtype=np.int64))


def _merge_identical(cols: np.ndarray, mults: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if cols.shape[1] == 0:
        return cols, mults
    unique, inverse = np.unique(cols, axis=1, return_inverse=True)
    merged = np.zeros(unique.shape[1], dtype=np.int64)
    np.add.at(merged, inverse.reshape(-1), mults)
    return unique, merged


def _ryser_mod(cols: np.ndarray, mults: np.ndarray, p: int, chunk: int) -> int:
    """Grouped Ryser sum reduced mod p."""
    n = cols.shape[0]
    if n == 0:
        return 1 % p
    if np.any(np.all(cols == 0, axis=1)):
        return 0

    sizes = [int(x) + 1 for x in mults]
    split = 0
    block = 1
    while split < len(sizes) and block * sizes[split] <= chunk:
        block *= sizes[split]
        split += 1

    low = np.array(list(itertools.product(*[range(s) for s in sizes[:split]])), dtype=np.int64)
    low = low.reshape(len(low), split)
    low_sums = low @ cols[:, :split].T
    low_coef = np.ones(len(low), dtype=np.int64)
    for j in range(split):
        binom = np.array([comb(int(mults[j]), k) % p for k in range(sizes[j])], dtype=np.int64)
        low_coef = low_coef * binom[low[:, j]] % p
    low_coef = np.where(low.sum(axis=1) % 2 == 1, (p - low_coef) % p, low_coef)

    total = 0
    for high in itertools.product(*[range(s) for s in sizes[split:]]):
        high_vec = np.array(high, dtype=np.int64)
        high_sums = cols[:, split:] @ high_vec if len(high) else np.zeros(n, dtype=np.int64)
        high_coef = prod(comb(int(mults[split + j]), k) for j, k in enumerate(high)) % p
        if high_coef == 0:
            continue
        sums = (low_sums + high_sums) % p
        acc = np.ones(len(low), dtype=np.int64)
        for r in range(n):
            acc = acc * sums[:, r] % p
        part = int(((acc * low_coef) % p).sum()) % p
        sign = (n - sum(high)) % 2
        total += (-part if sign else part) * high_coef
    return total % p


def _row_bound(cols: np.ndarray, mults: np.ndarray) -> int:
    """Upper bound on |per| by the product of absolute row sums."""
    return prod(int(x) for x in (np.abs(cols) @ mults))


def _crt_primes(bound: int) -> List[int]:
    needed = 2 * bound + 1
    primes: List[int] = []
    modulus = 1
    i = 0
    while modulus <= needed:
        if i == len(_CRT_PRIMES):
            _CRT_PRIMES.append(prevprime(_CRT_PRIMES[-1] if _CRT_PRIMES else 2 ** 31))
        primes.append(_CRT_PRIMES[i])
        modulus *= _CRT_PRIMES[i]
        i += 1
    return primes


def permanent_exact(m: MatrixLike, chunk_size: Optional[int] = None) -> int:
    """
    Exact permanent of A_G(eta) or of an explicit square integer matrix.

    Raises:
        InputError: If the matrix is not square

    Example:
        >>> permanent_exact(np.ones((3, 3), dtype=int))
        6
    """
    cols, mults = _as_grouped(m)
    if cols.shape[0] == 0:
        return 1
    chunk = chunk_size or settings.permanent_chunk_size
    bound = _row_bound(cols, mults)
    if bound == 0:
        return 0
    primes = _crt_primes(bound)
    residues = [_ryser_mod(cols, mults, q, chunk) for q in primes]
    value, modulus = crt(primes, residues)
    value, modulus = int(value), int(modulus)
    if value > modulus // 2:
        value -= modulus
    return value


def permanent_mod(m: MatrixLike, p: int, chunk_size: Optional[int] = None) -> int:
    """
    Permanent reduced into [0, p).

    Raises:
        InputError: If p is not prime or the matrix is not square
    """
    if not isprime(p):
        logger.error(f"permanent_mod called with non-prime modulus {p}")
        raise InputError(f"modulus {p} is not prime")
    cols, mults = _as_grouped(m)
    return _ryser_mod(cols, mults, p, chunk_size or settings.permanent_chunk_size)


def permanent_by_permutations(m: Sequence[Sequence[int]]) -> int:
    """Textbook n! expansion, kept as an oracle for small matrices."""
    arr = [list(map(int, row)) for row in m]
    n = len(arr)
    return sum(prod(arr[i][s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


def coefficient_from_permanent(base: CoefficientMatrix, eta: IndexFunction) -> int:
    """
    c_eta = per(A_G(eta)) / prod eta(z)!.

    Raises:
        ConsistencyError: If the division is not exact
    """
    per = permanent_exact(assemble(base, eta))
    denom = prod(factorial(n) for _, n in eta.items())
    if per % denom:
        logger.error(f"per {per} not divisible by {denom}")
        raise ConsistencyError(f"permanent {per} is not divisible by prod eta! = {denom}")
    return per // denom


# ============================================================================
# COLUMN IDENTITIES
# ============================================================================

def _check_identity(base: CoefficientMatrix, col: SymbolicColumn, target: np.ndarray, what: str) -> None:
    if not np.array_equal(base.combine(col), target):
        logger.error(f"{what}: combination does not reproduce its target column")
        raise ConsistencyError(f"{what}: column identity failed")


def balloon_combination(b: Balloon, base: CoefficientMatrix) -> SymbolicColumn:
    """
    Express 2 A_G(root) over the balloon's edge columns.

    Along the cycle u_1..u_m, 2A(u_1) is the alternating sum of the cycle
    edges starting with +A(u_1 u_2); along the path, 2A(v_i) = 2A(e_i) - 2A(v_{i+1}).

    Raises:
        InputError: Even balloon or an edge outside the host graph
    """
    if not b.odd:
        logger.error(f"balloon_combination on even balloon rooted at {b.root}")
        raise InputError("balloon cycle is even")
    missing = [e for e in b.edges if e not in base.graph.edge_set]
    if missing:
        raise InputError(f"balloon edges {missing} are not in the graph")

    combo: Dict[Element, int] = {}
    sign = 1
    for e in b.path_edges:
        combo[e] = combo.get(e, 0) + 2 * sign
        sign = -sign
    for j, e in enumerate(b.cycle_edges):
        combo[e] = combo.get(e, 0) + (sign if j % 2 == 0 else -sign)

    col = SymbolicColumn(combo=combo)
    _check_identity(base, col, 2 * base.column(b.root), "balloon")
    return col


def path_combination(path: Sequence[int], base: CoefficientMatrix) -> SymbolicColumn:
    """
    Alternating edge sum along x = p_0, ..., p_m = v.

    Equals A(v) + A(x) when m is odd and A(v) - A(x) when m is even; the edge
    at v carries +1.
    """
    m = len(path) - 1
    if m < 1:
        raise InputError("path needs at least one edge")
    combo: Dict[Element, int] = {}
    for j in range(1, m + 1):
        e = canonical_edge(path[j - 1], path[j])
        if e not in base.graph.edge_set:
            raise InputError(f"path edge {e} is not in the graph")
        combo[e] = combo.get(e, 0) + (1 if (m - j) % 2 == 0 else -1)

    col = SymbolicColumn(combo=combo)
    x_sign = 1 if m % 2 == 1 else -1
    _check_identity(base, col, base.column(path[-1]) + x_sign * base.column(path[0]), "path")
    return col


# ============================================================================
# BRANCH-AND-PRUNE EXPANSION
# ============================================================================

def _columns_permanent(base: CoefficientMatrix, columns: Sequence[SymbolicColumn], p: Optional[int]) -> int:
    dense = combine_columns(base, columns)
    return permanent_exact(dense) if p is None else permanent_mod(dense, p)


def expand_to_edge_columns(
    base: CoefficientMatrix,
    columns: Sequence[SymbolicColumn],
    p: Optional[int] = 3,
    cap: Optional[int] = None,
    budget: int = 10_000,
) -> IndexFunction:
    """
    Replace each combined column by one of its pure columns, keeping per != 0.

    Columns are expanded in input order; candidates are tried by descending
    |coefficient| then canonical element order. With a prime p the test is
    per != 0 mod p; with p None it is the exact per != 0. A branch that puts
    more than `cap` copies of one edge column is discarded.

    Args:
        base: A_G supplying the column vectors
        columns: Square list of symbolic columns (pure ones are kept)
        p: Prime modulus, or None for exact mode
        cap: Edge multiplicity cap (defaults to p - 1, or settings.edge_cap in exact mode)
        budget: Maximum number of permanent evaluations

    Returns:
        Index function counting the pure columns of the surviving branch

    Raises:
        InputError: If the input permanent already vanishes
        FallbackNeeded: If no branch survives within budget
    """
    if len(columns) != len(base.rows):
        raise InputError(f"{len(columns)} columns for {len(base.rows)} rows")
    if cap is None:
        cap = p - 1 if p is not None else settings.edge_cap

    start = _columns_permanent(base, columns, p)
    if start == 0:
        logger.error("expand_to_edge_columns: input permanent vanishes")
        raise InputError("input permanent is zero" + (f" mod {p}" if p else ""))

    state = list(columns)
    spent = [0]

    def counts() -> Dict[Element, int]:
        table: Dict[Element, int] = {}
        for c in state:
            if c.is_pure:
                table[c.element] = table.get(c.element, 0) + 1
        return table

    def descend(i: int) -> bool:
        while i < len(state) and state[i].is_pure:
            i += 1
        if i == len(state):
            return all(n <= cap for z, n in counts().items() if is_edge(z))
        original = state[i]
        candidates = sorted(original.combo.items(), key=lambda kv: (-abs(kv[1]), element_sort_key(kv[0])))
        used = counts()
        for z, _ in candidates:
            if is_edge(z) and used.get(z, 0) + 1 > cap:
                continue
            if spent[0] >= budget:
                break
            state[i] = SymbolicColumn.pure(z)
            spent[0] += 1
            if _columns_permanent(base, state, p) != 0 and descend(i + 1):
                return True
            state[i] = original
        return False

    if not descend(0):
        logger.warning(f"Expansion found no surviving branch after {spent[0]} evaluations")
        raise FallbackNeeded("branch-and-prune expansion exhausted")

    logger.debug(f"Expansion finished after {spent[0]} permanent evaluations")
    return IndexFunction.from_elements(counts())


# ============================================================================
# CERTIFICATES
# ============================================================================

def certificate_from_eta(
    g: Graph,
    eta: IndexFunction,
    provenance: Provenance,
    aux: Optional[Dict[str, Any]] = None,
) -> Certificate:
    """
    Wrap an edge-only index function into a Certificate.

    The permanent is recomputed exactly under the canonical orientation.

    Raises:
        FallbackNeeded: If eta is not a non-singular (0, edge_cap) index function
    """
    if eta.vertices or eta.max_edge() > settings.edge_cap or eta.total() != g.edge_count:
        logger.warning(f"{provenance.value}: index function is not a (0,{settings.edge_cap}) candidate")
        raise FallbackNeeded(f"{provenance.value}: index function out of shape")
    per = permanent_exact(assemble(build_coefficient_matrix(g), eta))
    if per == 0:
        logger.warning(f"{provenance.value}: constructed matrix is singular")
        raise FallbackNeeded(f"{provenance.value}: singular matrix")
    logger.info(f"Certificate produced: provenance={provenance.value}, per={per}")
    return Certificate(eta=eta, permanent=per, provenance=provenance, aux=aux or {})
