"""Exhaustive parity-factor enumeration and the brute-force decoding oracle.

These are reference implementations used for tests and the ``oracle`` CLI
subcommand.  ``brute_force_mwpf`` is deliberately independent of the
primal-dual solver: it reduces the parity constraints to RREF and walks every
free-variable assignment.
"""

from __future__ import annotations

from math import lcm
from typing import Iterable

from .gf2 import ParityMatrix, parity_matrix_rref
from .hypergraph import DecodingHypergraph, Weight, weight_of


class EnumerationOverflow(Exception):
    """Raised when a solution space exceeds the free-variable cap."""

    def __init__(self, nullity: int, cap: int):
        super().__init__(f"nullity {nullity} exceeds free-variable cap {cap}")
        self.nullity = nullity
        self.cap = cap


class InfeasibleSyndrome(Exception):
    """Raised when no parity factor exists for the requested syndrome."""


def solution_patterns(matrix: ParityMatrix, free_var_cap: int) -> list[frozenset[int]]:
    """All 2^nullity solutions of an RREF system, free bits counted in order.

    Assignment k sets free column j (ascending) to bit j of k; pivots follow
    by back-substitution.  Raises if the matrix has no solution or the nullity
    exceeds the cap.
    """
    if matrix.has_contradiction:
        raise InfeasibleSyndrome("subgraph admits no parity factor")
    nullity = matrix.nullity
    if nullity > free_var_cap:
        raise EnumerationOverflow(nullity, free_var_cap)
    x0, masks = matrix.solution_masks()
    out = []
    for k in range(1 << nullity):
        x = x0
        bits = k
        j = 0
        while bits:
            if bits & 1:
                x ^= masks[j]
            bits >>= 1
            j += 1
        out.append(matrix.columns_to_edges(x))
    return out


def enumerate_parity_factors(
    graph: DecodingHypergraph,
    vertices: Iterable[int],
    edges: Iterable[int],
    syndrome: Iterable[int],
    free_var_cap: int = 16,
) -> list[frozenset[int]]:
    """Every pattern within ``edges`` whose defects equal D intersect V_S."""
    vset = set(vertices)
    matrix = parity_matrix_rref(graph, vset, edges, set(syndrome) & vset)
    return solution_patterns(matrix, free_var_cap)


def pattern_sort_key(pattern: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(pattern))


def min_weight_pattern(
    graph: DecodingHypergraph, patterns: Iterable[frozenset[int]]
) -> tuple[frozenset[int], Weight]:
    """Minimum-weight pattern; ties broken by lexicographically smallest ids."""
    best = None
    best_weight = None
    best_key = None
    for pattern in patterns:
        w = weight_of(graph, pattern)
        key = pattern_sort_key(pattern)
        if best_weight is None or w < best_weight or (w == best_weight and key < best_key):
            best, best_weight, best_key = pattern, w, key
    if best is None:
        raise InfeasibleSyndrome("no patterns to minimize over")
    return best, best_weight


def local_mwpf(
    graph: DecodingHypergraph,
    vertices: Iterable[int],
    edges: Iterable[int],
    syndrome: Iterable[int],
    free_var_cap: int = 16,
) -> tuple[frozenset[int], Weight]:
    """Minimum-weight parity factor of a subgraph by exhaustive enumeration."""
    vset = set(vertices)
    matrix = parity_matrix_rref(graph, vset, edges, set(syndrome) & vset)
    if matrix.has_contradiction:
        raise InfeasibleSyndrome("subgraph admits no parity factor")
    nullity = matrix.nullity
    if nullity > free_var_cap:
        raise EnumerationOverflow(nullity, free_var_cap)
    if nullity >= 8:
        fast = _min_weight_vectorized(graph, matrix)
        if fast is not None:
            return fast
    return min_weight_pattern(graph, solution_patterns(matrix, free_var_cap))


def any_parity_factor(
    graph: DecodingHypergraph,
    vertices: Iterable[int],
    edges: Iterable[int],
    syndrome: Iterable[int],
) -> frozenset[int]:
    """One parity factor of a subgraph (free variables set to zero)."""
    vset = set(vertices)
    matrix = parity_matrix_rref(graph, vset, edges, set(syndrome) & vset)
    if matrix.has_contradiction:
        raise InfeasibleSyndrome("subgraph admits no parity factor")
    x0, _ = matrix.solution_masks()
    return matrix.columns_to_edges(x0)


def brute_force_mwpf(
    graph: DecodingHypergraph,
    syndrome: Iterable[int],
    free_var_cap: int = 16,
) -> tuple[frozenset[int], Weight]:
    """The decoding oracle: exhaustive minimum-weight parity factor.

    Deterministic: ties are broken by the lexicographically smallest edge-id
    set.  Raises :class:`InfeasibleSyndrome` when the syndrome has no parity
    factor and :class:`EnumerationOverflow` above the cap.
    """
    return local_mwpf(
        graph, range(graph.vertex_count), range(graph.edge_count), syndrome,
        free_var_cap=free_var_cap,
    )


def _min_weight_vectorized(
    graph: DecodingHypergraph, matrix: ParityMatrix
) -> tuple[frozenset[int], Weight] | None:
    """numpy-backed scan of all solutions; falls back to None when weights
    cannot be scaled to reasonably small integers."""
    try:
        import numpy as np
    except ImportError:  # pragma: no cover
        return None
    columns = matrix.column_edges
    denom = lcm(*(graph.weight(e).denominator for e in columns)) if columns else 1
    scaled = [graph.weight(e) * denom for e in columns]
    if any(w.numerator > 1 << 40 for w in scaled):
        return None
    x0, masks = matrix.solution_masks()
    k = len(masks)
    ncols = len(columns)

    def unpack(value: int) -> list[int]:
        return [(value >> j) & 1 for j in range(ncols)]

    basis = np.array([unpack(m) for m in masks], dtype=np.uint8)
    base = np.array(unpack(x0), dtype=np.uint8)
    assign = ((np.arange(1 << k, dtype=np.uint64)[:, None] >> np.arange(k, dtype=np.uint64)) & 1).astype(np.uint8)
    solutions = (assign @ basis) & 1
    solutions ^= base
    wvec = np.array([int(w) for w in scaled], dtype=np.int64)
    totals = solutions @ wvec
    best_total = totals.min()
    candidates = np.flatnonzero(totals == best_total)
    best_key = None
    best_row = None
    for idx in candidates:
        key = tuple(columns[j] for j in np.flatnonzero(solutions[idx]))
        if best_key is None or key < best_key:
            best_key, best_row = key, idx
    pattern = frozenset(best_key)
    return pattern, weight_of(graph, pattern)
