"""Decoding hypergraph: problem instance, exact weights, syndromes and error patterns.

A decoding problem is a hypergraph with one vertex per parity check and one
hyperedge per independent error source, weighted by an exact non-negative
rational.  An error pattern is a set of edges; its defects are the vertices
incident to an odd number of pattern edges.  A parity factor for a syndrome D
is a pattern whose defects equal D exactly.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

#: Exact rational edge weight.  Always stored in lowest terms with a positive
#: denominator; the solver relies on exact comparisons, never tolerances.
Weight = Fraction

ZERO = Fraction(0)


class HypergraphError(ValueError):
    """Raised for malformed problem instances."""


@dataclass(frozen=True)
class DecodingHypergraph:
    """Immutable decoding hypergraph.

    Edge ids are positions in ``edges``; ``adjacency[v]`` lists the ids of the
    edges incident to vertex ``v``.  Instances are safe to share between
    concurrent decodes.
    """

    vertex_count: int
    edges: tuple[tuple[frozenset[int], Weight], ...]
    adjacency: tuple[tuple[int, ...], ...]
    zero_weight_edges: tuple[int, ...] = ()
    _hair_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_vertices(self, edge_id: int) -> frozenset[int]:
        return self.edges[edge_id][0]

    def weight(self, edge_id: int) -> Weight:
        return self.edges[edge_id][1]

    def edges_incident(self, vertices: Iterable[int]) -> set[int]:
        """E(V'): ids of edges incident to at least one vertex of ``vertices``."""
        out: set[int] = set()
        for v in vertices:
            out.update(self.adjacency[v])
        return out

    def edges_within(self, vertices: Iterable[int]) -> set[int]:
        """E[V']: ids of edges whose vertices all lie inside ``vertices``."""
        vset = set(vertices)
        return {e for e in self.edges_incident(vset) if self.edges[e][0] <= vset}


@dataclass(frozen=True, order=True)
class SubgraphRef:
    """A subgraph (V_S, E_S) with every edge of E_S fully inside V_S.

    Vertex and edge ids are stored sorted, so equal subgraphs compare and hash
    equal.  The default ordering (by vertex-set size, then vertices, then
    edge-set size, then edges) is the canonical ordering used everywhere a
    deterministic scan over dual variables is required.
    """

    sort_index: tuple = field(init=False, repr=False)
    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(sorted(set(self.vertices)))
        es = tuple(sorted(set(self.edges)))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "sort_index", (len(vs), vs, len(es), es))

    def validate(self, graph: DecodingHypergraph) -> None:
        for v in self.vertices:
            if not 0 <= v < graph.vertex_count:
                raise HypergraphError(f"subgraph vertex {v} out of range")
        vset = set(self.vertices)
        for e in self.edges:
            if not 0 <= e < graph.edge_count:
                raise HypergraphError(f"subgraph edge {e} out of range")
            if not graph.edge_vertices(e) <= vset:
                raise HypergraphError(
                    f"subgraph edge {e} has vertices outside the vertex set")


def build_hypergraph(
    vertex_count: int,
    edges: Sequence[tuple[Iterable[int], Weight]],
) -> DecodingHypergraph:
    """Build a validated hypergraph from (vertex set, weight) pairs.

    Weights must already be non-negative; run
    :func:`preprocess_negative_weights` first if they are not.
    """
    if vertex_count < 0:
        raise HypergraphError("vertex_count must be non-negative")
    adjacency: list[list[int]] = [[] for _ in range(vertex_count)]
    normalized: list[tuple[frozenset[int], Weight]] = []
    for eid, (verts, weight) in enumerate(edges):
        vlist = list(verts)
        vset = frozenset(vlist)
        if not vset:
            raise HypergraphError(f"edge {eid} has an empty vertex set")
        if len(vlist) != len(vset):
            raise HypergraphError(f"edge {eid} repeats a vertex")
        for v in vset:
            if not 0 <= v < vertex_count:
                raise HypergraphError(f"edge {eid} vertex {v} out of range")
        w = Fraction(weight)
        if w < 0:
            raise HypergraphError(
                f"edge {eid} has negative weight {w}; preprocess first")
        normalized.append((vset, w))
        for v in sorted(vset):
            adjacency[v].append(eid)
    return DecodingHypergraph(
        vertex_count=vertex_count,
        edges=tuple(normalized),
        adjacency=tuple(tuple(a) for a in adjacency),
        zero_weight_edges=tuple(
            e for e, (_, w) in enumerate(normalized) if w == 0),
    )


def defects_of(graph: DecodingHypergraph, pattern: Iterable[int]) -> frozenset[int]:
    """Vertices incident to an odd number of pattern edges."""
    counts: dict[int, int] = {}
    for e in pattern:
        if not 0 <= e < graph.edge_count:
            raise HypergraphError(f"edge id {e} out of range")
        for v in graph.edge_vertices(e):
            counts[v] = counts.get(v, 0) + 1
    return frozenset(v for v, c in counts.items() if c % 2 == 1)


def weight_of(graph: DecodingHypergraph, pattern: Iterable[int]) -> Weight:
    """Exact total weight of a pattern."""
    total = ZERO
    for e in pattern:
        if not 0 <= e < graph.edge_count:
            raise HypergraphError(f"edge id {e} out of range")
        total += graph.weight(e)
    return total


def validate_syndrome(graph: DecodingHypergraph, defects: Iterable[int]) -> frozenset[int]:
    out = frozenset(defects)
    for v in out:
        if not 0 <= v < graph.vertex_count:
            raise HypergraphError(f"syndrome vertex {v} out of range")
    return out


def preprocess_negative_weights(
    graph_edges: Sequence[tuple[Iterable[int], Weight]],
    vertex_count: int,
    defects: Iterable[int],
) -> tuple[DecodingHypergraph, frozenset[int], frozenset[int]]:
    """Fold negative-weight edges into the syndrome.

    Each edge with w < 0 is treated as always occurring: its weight is negated
    and its defects are xor-ed into the syndrome.  Returns the rewritten graph,
    the rewritten syndrome, and the flip set.  A solution E' of the rewritten
    problem maps back to E = E' xor flip_set on the original problem.
    """
    flips: set[int] = set()
    fixed: list[tuple[frozenset[int], Weight]] = []
    syndrome = set(defects)
    for eid, (verts, weight) in enumerate(graph_edges):
        w = Fraction(weight)
        vset = frozenset(verts)
        if w < 0:
            flips.add(eid)
            w = -w
            syndrome ^= vset
        fixed.append((vset, w))
    graph = build_hypergraph(vertex_count, fixed)
    return graph, validate_syndrome(graph, syndrome), frozenset(flips)


def postprocess_pattern(pattern: Iterable[int], flip_set: Iterable[int]) -> frozenset[int]:
    """Map a solution of the preprocessed problem back to the original one."""
    return frozenset(pattern) ^ frozenset(flip_set)


def edge_weight_from_probability(p: Fraction, fractional_bits: int = 64) -> Weight:
    """Weight of an error source with probability p: log((1-p)/p).

    The logarithm is irrational in general, so the result is a fixed-precision
    rational approximation (round-to-nearest at ``fractional_bits`` binary
    digits).  The sign always matches sign(1/2 - p): results that would round
    to zero for p != 1/2 are nudged to the smallest representable step.
    Swapping p and 1-p negates the result exactly.
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise HypergraphError(f"probability must be in (0, 1), got {p}")
    if p == Fraction(1, 2):
        return ZERO
    # (1-p)/p as an exact integer ratio so that ln(num) - ln(den) is computed
    # from the same two correctly-rounded integer logarithms either way round,
    # preserving exact antisymmetry under p <-> 1-p.
    num = p.denominator - p.numerator
    den = p.numerator
    ctx = decimal.Context(prec=max(40, fractional_bits // 3 + 30))
    log_ratio = ctx.ln(decimal.Decimal(num)) - ctx.ln(decimal.Decimal(den))
    scaled = Fraction(log_ratio) * (1 << fractional_bits)
    rounded = round(scaled)  # round-half-even, sign-symmetric
    if rounded == 0:
        rounded = 1 if p < Fraction(1, 2) else -1
    return Fraction(rounded, 1 << fractional_bits)
