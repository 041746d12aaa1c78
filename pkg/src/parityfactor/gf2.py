"""Bit-packed GF(2) parity matrices in reduced row echelon form.

Rows are Python ints used as bitsets: bit j is matrix column j, and the bit
just past the last edge column is the augmented syndrome column.  Column j is
mapped to an edge id through ``column_edges``, so reordering columns (needed
when building hyperblossom matrices) is an index-map change, never a data
move.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .hypergraph import DecodingHypergraph, HypergraphError


@dataclass(frozen=True)
class ParityMatrix:
    """An augmented GF(2) parity matrix reduced to RREF.

    ``rows`` contains only non-zero rows, ordered by pivot column.
    ``pivot_columns[i]`` is the pivot column of ``rows[i]``; a pivot equal to
    ``len(column_edges)`` marks a contradiction row (syndrome bit set, all
    edge bits clear).
    """

    column_edges: tuple[int, ...]
    row_labels: tuple[int, ...]
    rows: tuple[int, ...]
    pivot_columns: tuple[int, ...]

    @property
    def syndrome_bit(self) -> int:
        return 1 << len(self.column_edges)

    @property
    def has_contradiction(self) -> bool:
        return bool(self.pivot_columns) and self.pivot_columns[-1] == len(self.column_edges)

    @property
    def nullity(self) -> int:
        if self.has_contradiction:
            raise HypergraphError("nullity undefined: no solution exists")
        return len(self.column_edges) - len(self.pivot_columns)

    def pivot_row_of_column(self, column: int) -> int | None:
        for i, c in enumerate(self.pivot_columns):
            if c == column:
                return i
            if c > column:
                return None
        return None

    def free_columns(self) -> list[int]:
        pivots = set(self.pivot_columns)
        return [j for j in range(len(self.column_edges)) if j not in pivots]

    def solution_masks(self) -> tuple[int, list[int]]:
        """Particular solution and per-free-column toggle masks.

        Returns ``(x0, masks)`` over column bit positions.  Every solution is
        ``x0 ^ xor(masks[j] for chosen free columns j)``; flipping free column
        f also flips the pivot columns whose rows contain f.
        """
        if self.has_contradiction:
            raise HypergraphError("no solution exists")
        x0 = 0
        syn = self.syndrome_bit
        for row, pivot in zip(self.rows, self.pivot_columns):
            if row & syn:
                x0 |= 1 << pivot
        masks = []
        for f in self.free_columns():
            fbit = 1 << f
            mask = fbit
            for row, pivot in zip(self.rows, self.pivot_columns):
                if row & fbit:
                    mask |= 1 << pivot
            masks.append(mask)
        return x0, masks

    def columns_to_edges(self, column_mask: int) -> frozenset[int]:
        return frozenset(
            self.column_edges[j]
            for j in range(len(self.column_edges))
            if column_mask >> j & 1
        )


def _rref(rows: list[int], width: int) -> tuple[list[int], list[int]]:
    """In-place Gauss-Jordan over GF(2); returns non-zero rows and pivots.

    ``width`` counts all columns including the augmented one, so a
    contradiction surfaces as a pivot in the last column.
    """
    pivots: list[int] = []
    kept: list[int] = []
    for col in range(width):
        bit = 1 << col
        pivot_row = None
        for i, r in enumerate(rows):
            if r & bit:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        r = rows.pop(pivot_row)
        for i, other in enumerate(rows):
            if other & bit:
                rows[i] = other ^ r
        for i, other in enumerate(kept):
            if other & bit:
                kept[i] = other ^ r
        kept.append(r)
        pivots.append(col)
        if not rows:
            break
    return kept, pivots


def parity_matrix_rref(
    graph: DecodingHypergraph,
    vertex_set: Iterable[int],
    edge_subset: Iterable[int],
    syndrome: Iterable[int],
    column_order: Sequence[int] | None = None,
) -> ParityMatrix:
    """RREF parity matrix of a subgraph with the syndrome as the last column.

    One row per vertex of ``vertex_set`` (zero rows are dropped by the
    reduction), one column per edge of ``edge_subset`` in ``column_order``
    (sorted edge ids when omitted).  Row additions preserve the solution set
    of M (x, 1)^T = 0.
    """
    vertices = sorted(set(vertex_set))
    edge_set = set(edge_subset)
    if column_order is None:
        columns = tuple(sorted(edge_set))
    else:
        columns = tuple(column_order)
        if len(columns) != len(edge_set) or set(columns) != edge_set:
            raise HypergraphError("column_order is not a permutation of the edge subset")
    col_of_edge = {e: j for j, e in enumerate(columns)}
    defects = set(syndrome)
    syn_bit = 1 << len(columns)
    rows = []
    for v in vertices:
        row = 0
        for e in graph.adjacency[v]:
            j = col_of_edge.get(e)
            if j is not None:
                row |= 1 << j
        if v in defects:
            row |= syn_bit
        rows.append(row)
    kept, pivots = _rref(rows, len(columns) + 1)
    return ParityMatrix(
        column_edges=columns,
        row_labels=tuple(vertices),
        rows=tuple(kept),
        pivot_columns=tuple(pivots),
    )


def is_invalid(
    graph: DecodingHypergraph,
    vertices: Iterable[int],
    edges: Iterable[int],
    syndrome: Iterable[int],
) -> bool:
    """True iff no pattern within ``edges`` produces exactly D intersect V_S.

    Detected as a contradiction row (syndrome bit 1, all edge bits 0) in the
    RREF of the subgraph parity matrix.
    """
    vset = set(vertices)
    matrix = parity_matrix_rref(graph, vset, edges, set(syndrome) & vset)
    return matrix.has_contradiction
