"""Relaxer finding and composition.

A relaxer is a feasible dual direction that un-tightens at least one tight
edge without decreasing the dual objective.  Finders run per cluster against
a (possibly already reduced) tight-edge set; ``batched_relaxing`` collects
relaxers while shrinking that set and re-lifts each one to the cluster's full
tight set so a single composed direction can be handed to the dual phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .dual import DualVarKey, direction_edge_deltas, hair_of
from .gf2 import ParityMatrix, is_invalid, parity_matrix_rref
from .hypergraph import DecodingHypergraph, SubgraphRef, weight_of
from .oracle import solution_patterns

ZERO = Fraction(0)
ONE = Fraction(1)


class FinderContractError(Exception):
    """A relaxer finder returned something that is not a valid relaxer."""


@dataclass(frozen=True)
class Relaxer:
    """A unit-scale relaxing direction and the tight edges it relaxes."""

    direction: Mapping[DualVarKey, Fraction]
    relaxed_edges: frozenset[int]


@dataclass(frozen=True)
class FinderContext:
    """Cluster-local view handed to relaxer finders.

    ``checks`` is an optional invariant recorder (see decoder module) used by
    the instrumented property suite; finders report structural facts to it.
    """

    graph: DecodingHypergraph
    syndrome: frozenset[int]
    vertices: frozenset[int]
    tight_edges: frozenset[int]
    hyperblossoms: tuple[DualVarKey, ...]
    dual_values: Mapping[DualVarKey, Fraction]
    checks: object | None = None

    def with_tight(self, tight: frozenset[int]) -> "FinderContext":
        return FinderContext(
            self.graph, self.syndrome, self.vertices, tight,
            self.hyperblossoms, self.dual_values, self.checks,
        )


@dataclass(frozen=True)
class HairMatrixView:
    """The hair matrix of one hyperblossom inside its cluster.

    ``parent`` is the cluster parity matrix reduced with the hyperblossom's
    tight hairs as the rightmost edge columns; the view is everything below
    the last pivot of the non-hair columns, restricted to the hair columns
    plus the syndrome column.  An Odd row has its syndrome bit set.
    """

    parent: ParityMatrix
    row_start: int
    hair_columns: tuple[int, ...]  # column indices of tight hairs in parent

    def rows(self) -> tuple[int, ...]:
        return self.parent.rows[self.row_start:]

    def odd_rows(self) -> list[int]:
        syn = self.parent.syndrome_bit
        return [r for r in self.rows() if r & syn]

    def hair_edges_of_row(self, row: int) -> frozenset[int]:
        return frozenset(
            self.parent.column_edges[j] for j in self.hair_columns if row >> j & 1
        )

    def is_single_all_ones(self) -> bool:
        rows = self.rows()
        if len(rows) != 1:
            return False
        full = self.parent.syndrome_bit
        for j in self.hair_columns:
            full |= 1 << j
        return rows[0] == full


def hyperblossom_hair_matrix(
    graph: DecodingHypergraph,
    cluster_vertices: Iterable[int],
    tight_edges: Iterable[int],
    syndrome: Iterable[int],
    key: DualVarKey,
) -> HairMatrixView:
    """Build the hair matrix of ``key`` within the cluster subgraph.

    Column order: non-hair tight edges first (sorted), then tight hairs of
    the hyperblossom (sorted), then the syndrome column.
    """
    vset = set(cluster_vertices)
    if not set(key.vertices) <= vset:
        raise ValueError(f"hyperblossom {key} is not within the cluster")
    tight = set(tight_edges)
    hairs = sorted(hair_of(graph, key) & tight)
    non_hairs = sorted(tight - set(hairs))
    order = non_hairs + hairs
    matrix = parity_matrix_rref(graph, vset, tight, set(syndrome) & vset, order)
    row_start = sum(1 for c in matrix.pivot_columns if c < len(non_hairs))
    hair_cols = tuple(range(len(non_hairs), len(order)))
    return HairMatrixView(parent=matrix, row_start=row_start, hair_columns=hair_cols)


def single_hair_find(ctx: FinderContext) -> Relaxer | None:
    """Relax one tight hair of one hyperblossom via an Odd row.

    Scans hyperblossoms in canonical order; for the first one whose hair
    matrix has an Odd row with at least one zero hair column, shrinks it and
    grows the invalid subgraph keeping everything but that row's edges.
    Returns None when the cluster's tight subgraph is invalid or every
    hyperblossom is in its terminal single-hair state.
    """
    if is_invalid(ctx.graph, ctx.vertices, ctx.tight_edges, ctx.syndrome):
        return None
    for key in ctx.hyperblossoms:
        view = hyperblossom_hair_matrix(
            ctx.graph, ctx.vertices, ctx.tight_edges, ctx.syndrome, key)
        odd = view.odd_rows()
        if ctx.checks is not None:
            ctx.checks.record("odd_row_existence", bool(odd))
        if not odd:
            continue
        grown_hairs = view.hair_edges_of_row(odd[0])
        relaxed = (hair_of(ctx.graph, key) & ctx.tight_edges) - grown_hairs
        if not relaxed:
            if ctx.checks is not None:
                ctx.checks.record("unique_row_termination", view.is_single_all_ones())
            continue  # terminal: single all-ones row
        grown = SubgraphRef(tuple(ctx.vertices), tuple(ctx.tight_edges - grown_hairs))
        if grown == key:
            continue  # degenerate: the direction would cancel out
        return Relaxer(
            direction={key: -ONE, grown: ONE},
            relaxed_edges=frozenset(relaxed),
        )
    return None


def union_find_find(ctx: FinderContext) -> Relaxer | None:
    """The trivial finder: never relaxes anything.

    With this finder the driver degenerates to weighted hypergraph union-find
    growth, since only invalid-cluster growth directions remain.
    """
    return None


def nullity_le1_find(ctx: FinderContext) -> Relaxer | None:
    """Optimal relaxer finder for clusters whose span has nullity 0 or 1.

    Explicitly constructs the optimal dual of the cluster's full subgraph
    (V_C, E[V_C]) and turns the gap between it and the current dual into a
    relaxer.  Returns None when the tight subgraph is invalid, the nullity
    exceeds 1, or the dual already sits at the local optimum.
    """
    graph = ctx.graph
    if is_invalid(graph, ctx.vertices, ctx.tight_edges, ctx.syndrome):
        return None
    span_edges = graph.edges_within(ctx.vertices)
    local_syndrome = ctx.syndrome & ctx.vertices
    matrix = parity_matrix_rref(graph, ctx.vertices, span_edges, local_syndrome)
    if matrix.has_contradiction or matrix.nullity > 1:
        return None
    patterns = solution_patterns(matrix, free_var_cap=1)
    optimal = _optimal_nullity_le1_dual(graph, ctx.vertices, span_edges, patterns)
    target = sum(optimal.values(), ZERO)
    current = sum(ctx.dual_values.values(), ZERO)
    if current >= target:
        return None
    delta: dict[DualVarKey, Fraction] = dict(optimal)
    for key, value in ctx.dual_values.items():
        delta[key] = delta.get(key, ZERO) - value
    spill = sum(delta.values(), ZERO)
    anchor_key = None
    for e in sorted(e for e in ctx.tight_edges if graph.weight(e) > 0):
        for key in ctx.hyperblossoms:
            if e in hair_of(graph, key):
                anchor_key = key
                break
        if anchor_key is not None:
            break
    if anchor_key is None:
        return None
    delta[anchor_key] = delta.get(anchor_key, ZERO) - spill
    delta = {k: v for k, v in delta.items() if v != 0}
    deltas = direction_edge_deltas(graph, delta)
    relaxed = frozenset(
        e for e in ctx.tight_edges if deltas.get(e, ZERO) < 0)
    if not relaxed:  # pragma: no cover - anchor edge is always relaxed
        return None
    return Relaxer(direction=delta, relaxed_edges=relaxed)


def _optimal_nullity_le1_dual(
    graph: DecodingHypergraph,
    vertices: frozenset[int],
    span_edges: set[int],
    patterns: Sequence[frozenset[int]],
) -> dict[DualVarKey, Fraction]:
    """Optimal dual of a nullity<=1 subgraph from its parity factors.

    Nullity 0: load each pattern edge through the subgraph missing only that
    edge.  Nullity 1: lay both patterns out as weighted lines, shared edges
    first, and give each overlapping interval the subgraph missing that
    interval's edge pair.  Zero-length intervals are skipped so no zero dual
    values are ever stored.
    """
    vtuple = tuple(sorted(vertices))
    if len(patterns) == 1:
        pattern = patterns[0]
        return {
            SubgraphRef(vtuple, tuple(span_edges - {e})): graph.weight(e)
            for e in sorted(pattern)
            if graph.weight(e) > 0
        }
    by_weight = sorted(
        patterns, key=lambda p: (weight_of(graph, p), tuple(sorted(p))))
    first, second = by_weight[0], by_weight[1]
    shared = sorted(first & second)
    line1 = shared + sorted(first - second)
    line2 = shared + sorted(second - first)
    target = weight_of(graph, first)

    def joints(line: list[int]) -> list[tuple[Fraction, int]]:
        out = []
        pos = ZERO
        for e in line:
            out.append((pos, e))
            pos += graph.weight(e)
        return out

    starts1, starts2 = joints(line1), joints(line2)
    cuts = sorted({p for p, _ in starts1} | {p for p, _ in starts2} | {target})
    cuts = [c for c in cuts if c <= target]

    def edge_at(starts: list[tuple[Fraction, int]], pos: Fraction) -> int:
        chosen = starts[0][1]
        for start, e in starts:
            if start <= pos:
                chosen = e
            else:
                break
        return chosen

    optimal: dict[DualVarKey, Fraction] = {}
    for a, b in zip(cuts, cuts[1:]):
        if b == a:
            continue
        e1 = edge_at(starts1, a)
        e2 = edge_at(starts2, a)
        key = SubgraphRef(vtuple, tuple(span_edges - {e1, e2}))
        optimal[key] = optimal.get(key, ZERO) + (b - a)
    return optimal


def compose(
    graph: DecodingHypergraph,
    relaxers: Sequence[Relaxer],
    direction: Mapping[DualVarKey, Fraction],
    tight_edges: Iterable[int],
) -> dict[DualVarKey, Fraction]:
    """Lift a direction that is feasible on a reduced tight set back to T.

    For every relaxed tight edge whose summed delta turned positive, the
    first relaxer covering the edge is mixed in with exactly the scale that
    cancels the violation.  The composed direction is feasible on T and its
    objective sum never drops below the input's.
    """
    tight = set(tight_edges)
    out = {k: v for k, v in direction.items() if v != 0}
    covered = set()
    for r in relaxers:
        covered |= r.relaxed_edges
    for e in sorted(covered & tight):
        alpha = ZERO
        for key, value in out.items():
            if e in hair_of(graph, key):
                alpha += value
        if alpha <= 0:
            continue
        fix = None
        for r in relaxers:
            if e in r.relaxed_edges:
                fix = r
                break
        if fix is None:  # pragma: no cover - covered comes from the relaxers
            raise FinderContractError(f"no relaxer covers violated edge {e}")
        rate = ZERO
        for key, value in fix.direction.items():
            if e in hair_of(graph, key):
                rate += value
        if rate >= 0:
            raise FinderContractError(
                f"relaxer claims edge {e} but does not relax it")
        scale = alpha / -rate
        for key, value in fix.direction.items():
            new = out.get(key, ZERO) + scale * value
            if new == 0:
                out.pop(key, None)
            else:
                out[key] = new
    return out


def validate_relaxer(
    ctx: FinderContext, relaxer: Relaxer, tight: frozenset[int]
) -> None:
    """Enforce the relaxer contract; raises FinderContractError on breach."""
    if not relaxer.relaxed_edges:
        raise FinderContractError("relaxer relaxes nothing")
    if not relaxer.relaxed_edges <= tight:
        raise FinderContractError("relaxed edges are not all tight")
    for key, value in relaxer.direction.items():
        if value < 0 and ctx.dual_values.get(key, ZERO) <= 0:
            raise FinderContractError(f"shrinks non-hyperblossom {key}")
    if sum(relaxer.direction.values(), ZERO) < 0:
        raise FinderContractError("relaxer decreases the dual objective")
    deltas = direction_edge_deltas(ctx.graph, relaxer.direction)
    for e in tight:
        if deltas.get(e, ZERO) > 0:
            raise FinderContractError(f"relaxer grows tight edge {e}")
    for e in relaxer.relaxed_edges:
        if deltas.get(e, ZERO) >= 0:
            raise FinderContractError(f"claimed edge {e} is not strictly relaxed")


Finder = Callable[[FinderContext], Relaxer | None]


def batched_relaxing(
    ctx: FinderContext,
    finders: Sequence[Finder],
    on_invocation: Callable[[], None] | None = None,
    validate: bool = False,
) -> list[Relaxer]:
    """Collect relaxers against a shrinking tight set, re-lifted to T.

    Finders are tried in configuration order each round; the first non-None
    answer wins.  Terminates once every finder passes, after at most |T|
    relaxers.  Each lifted relaxer relaxes a superset of its raw edges, so
    the reduced set shrinks strictly every round.
    """
    original = ctx.tight_edges
    remaining = set(original)
    lifted: list[Relaxer] = []
    for _ in range(len(original) + 1):
        raw = None
        sub_ctx = ctx.with_tight(frozenset(remaining))
        for finder in finders:
            if on_invocation is not None:
                on_invocation()
            raw = finder(sub_ctx)
            if raw is not None:
                break
        if raw is None:
            return lifted
        if validate:
            validate_relaxer(sub_ctx, raw, frozenset(remaining))
            if ctx.checks is not None:
                ctx.checks.record("relaxer_invariants", True)
        composed = compose(ctx.graph, lifted, raw.direction, original)
        if ctx.checks is not None:
            gain = sum(composed.values(), ZERO) - sum(raw.direction.values(), ZERO)
            ctx.checks.record("compose_monotonicity", gain >= 0)
        deltas = direction_edge_deltas(ctx.graph, composed)
        relaxed = frozenset(
            e for e in original if deltas.get(e, ZERO) < 0)
        if not relaxed & remaining:
            raise FinderContractError(
                "lifted relaxer does not relax any remaining tight edge")
        lifted.append(Relaxer(direction=composed, relaxed_edges=relaxed))
        remaining -= relaxed
    raise FinderContractError("batched relaxing exceeded the tight-edge bound")


FINDERS: dict[str, Finder] = {
    "single-hair": single_hair_find,
    "union-find": union_find_find,
    "nullity-le1": nullity_le1_find,
}
