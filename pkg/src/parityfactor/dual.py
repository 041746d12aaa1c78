"""Dual solution state: variables over invalid subgraphs, slack, directions.

A dual variable y_S is indexed by an invalid subgraph S; only strictly
positive entries are stored, so the key set is exactly the hyperblossom set.
Feasibility means every edge's summed contribution stays at or below its
weight; edges at equality are tight.  All comparisons are exact rational
comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from . import simplex
from .gf2 import is_invalid
from .hypergraph import DecodingHypergraph, HypergraphError, SubgraphRef, Weight

ZERO = Fraction(0)

#: Alias used where a subgraph indexes a dual variable.  Canonical ordering is
#: the SubgraphRef ordering: (|V_S|, V_S, |E_S|, E_S).
DualVarKey = SubgraphRef


class InfeasibleDual(Exception):
    """A dual constraint is violated (negative slack): contract breach."""


class UnboundedGrowth(Exception):
    """MAX growth has no finite binding constraint (malformed instance)."""


def hair_of(graph: DecodingHypergraph, subgraph: SubgraphRef) -> frozenset[int]:
    """delta(S): edges incident to V_S but not in E_S.  Memoized per graph."""
    cached = graph._hair_cache.get(subgraph)
    if cached is None:
        cached = frozenset(graph.edges_incident(subgraph.vertices)) - set(subgraph.edges)
        graph._hair_cache[subgraph] = cached
    return cached


def make_dual_key(
    graph: DecodingHypergraph,
    syndrome: Iterable[int],
    vertices: Iterable[int],
    edges: Iterable[int],
) -> DualVarKey:
    """Canonicalize and validate a dual variable key.

    The referenced subgraph must be invalid for the syndrome and must have a
    non-empty hair (a hairless invalid subgraph makes the dual unbounded and
    can only come from a malformed instance).
    """
    key = SubgraphRef(tuple(vertices), tuple(edges))
    key.validate(graph)
    if not is_invalid(graph, key.vertices, key.edges, syndrome):
        raise HypergraphError(f"subgraph {key} is not invalid: not a dual variable")
    if not hair_of(graph, key):
        raise HypergraphError(f"invalid subgraph {key} has empty hair: instance error")
    return key


@dataclass
class DualSolution:
    """Sparse dual solution with a per-edge contribution cache.

    Single-writer: mutate only through :meth:`set_value` /
    :func:`apply_direction` so the cache stays consistent.
    """

    graph: DecodingHypergraph
    values: dict[DualVarKey, Fraction] = field(default_factory=dict)
    contribution: dict[int, Fraction] = field(default_factory=dict)

    def copy(self) -> "DualSolution":
        return DualSolution(self.graph, dict(self.values), dict(self.contribution))

    def value(self, key: DualVarKey) -> Fraction:
        return self.values.get(key, ZERO)

    def edge_contribution(self, edge: int) -> Fraction:
        return self.contribution.get(edge, ZERO)

    def set_value(self, key: DualVarKey, value: Fraction) -> None:
        old = self.values.get(key, ZERO)
        delta = value - old
        if delta == 0:
            return
        for e in hair_of(self.graph, key):
            new = self.contribution.get(e, ZERO) + delta
            if new == 0:
                self.contribution.pop(e, None)
            else:
                self.contribution[e] = new
        if value == 0:
            self.values.pop(key, None)
        elif value < 0:
            raise InfeasibleDual(f"negative dual value {value} for {key}")
        else:
            self.values[key] = value

    def hyperblossoms(self) -> list[DualVarKey]:
        return sorted(self.values)

    def slack(self, edge: int) -> Fraction:
        s = self.graph.weight(edge) - self.edge_contribution(edge)
        if s < 0:
            raise InfeasibleDual(f"edge {edge} over-contributed by {-s}")
        return s

    def is_tight(self, edge: int) -> bool:
        return self.slack(edge) == 0


def dual_objective(dual: DualSolution | Mapping[DualVarKey, Fraction]) -> Weight:
    values = dual.values if isinstance(dual, DualSolution) else dual
    return sum(values.values(), ZERO)


def slack_and_tight(
    graph: DecodingHypergraph, dual: DualSolution
) -> tuple[dict[int, Weight], frozenset[int]]:
    """Per-edge slack and the tight set, via exact comparison."""
    slack = {}
    tight = set()
    for e in range(graph.edge_count):
        s = dual.slack(e)
        slack[e] = s
        if s == 0:
            tight.add(e)
    return slack, frozenset(tight)


class DirectionCheck(NamedTuple):
    ok: bool
    violation: str | None


def direction_edge_deltas(
    graph: DecodingHypergraph, direction: Mapping[DualVarKey, Fraction]
) -> dict[int, Fraction]:
    """Summed delta contribution per edge for a direction (zero net dropped)."""
    out: dict[int, Fraction] = {}
    for key, delta in direction.items():
        if delta == 0:
            continue
        for e in hair_of(graph, key):
            out[e] = out.get(e, ZERO) + delta
    return {e: d for e, d in out.items() if d != 0}


def check_feasible_direction(
    graph: DecodingHypergraph,
    dual: DualSolution,
    direction: Mapping[DualVarKey, Fraction],
    tight: Iterable[int] | None = None,
) -> DirectionCheck:
    """Feasibility of a direction: (a) shrink only hyperblossoms, and
    (b) never grow the contribution of a tight edge.

    ``tight`` overrides the tight set (used when checking relaxers against a
    reduced tight set); by default it is computed from the dual.
    """
    for key in sorted(k for k, d in direction.items() if d < 0):
        if dual.value(key) <= 0:
            return DirectionCheck(False, f"negative delta on non-hyperblossom {key}")
    if tight is None:
        tight_set = {e for e in range(graph.edge_count) if dual.is_tight(e)}
    else:
        tight_set = set(tight)
    deltas = direction_edge_deltas(graph, direction)
    for e in sorted(tight_set):
        if deltas.get(e, ZERO) > 0:
            return DirectionCheck(False, f"tight edge {e} would grow by {deltas[e]}")
    return DirectionCheck(True, None)


MAX_GROWTH = object()


def apply_direction(
    graph: DecodingHypergraph,
    dual: DualSolution,
    direction: Mapping[DualVarKey, Fraction],
    length: Fraction | object = MAX_GROWTH,
) -> tuple[DualSolution, Fraction]:
    """Grow the dual along a feasible direction.

    With an explicit length, applies y' = y + l * delta.  With MAX, grows by
    the largest feasible length: the minimum over slacks of growing edges and
    over floors of shrinking variables.  Raises :class:`UnboundedGrowth` when
    nothing binds.
    """
    check = check_feasible_direction(graph, dual, direction)
    if not check.ok:
        raise InfeasibleDual(f"direction infeasible: {check.violation}")
    deltas = direction_edge_deltas(graph, direction)
    if length is MAX_GROWTH:
        bound = None
        for e, d in deltas.items():
            if d > 0:
                candidate = dual.slack(e) / d
                bound = candidate if bound is None else min(bound, candidate)
        for key, d in direction.items():
            if d < 0:
                candidate = dual.value(key) / -d
                bound = candidate if bound is None else min(bound, candidate)
        if not any(d != 0 for d in direction.values()):
            return dual, ZERO
        if bound is None:
            raise UnboundedGrowth("no slack or variable bound limits this direction")
        length = bound
    else:
        length = Fraction(length)
        if length < 0:
            raise ValueError("negative growth length")
    result = dual.copy()
    for key in sorted(direction):
        d = direction[key]
        if d != 0:
            result.set_value(key, result.value(key) + length * d)
    for e in deltas:
        if result.slack(e) < 0:  # pragma: no cover - guarded by feasibility
            raise InfeasibleDual(f"edge {e} oversubscribed after growth")
    return result, length


def solve_restricted_dlp(
    graph: DecodingHypergraph,
    history: Iterable[DualVarKey],
    edge_scope: Iterable[int],
    capacity: Mapping[int, Fraction] | None = None,
) -> dict[DualVarKey, Fraction]:
    """Exact maximizer of sum(y_S) over the history keys.

    All dual variables outside ``history`` are fixed at zero; each edge of
    ``edge_scope`` contributes one packing constraint.  ``capacity`` overrides
    per-edge capacities (weight minus contributions held fixed elsewhere).
    Deterministic: keys enter the tableau in canonical order and the simplex
    pivots deterministically.  Returns only the strictly positive entries.
    """
    keys = sorted(set(history))
    scope = sorted(set(edge_scope))
    scope_set = set(scope)
    hairs = {k: hair_of(graph, k) for k in keys}
    for key in keys:
        if not hairs[key] <= scope_set:
            raise HypergraphError(f"edge scope misses hair edges of {key}")
    # Keys with identical hair sets are interchangeable in this LP; the
    # canonical-first representative absorbs the whole group value, which is
    # exactly where lowest-index-first pivoting would put it anyway.
    reps: list[DualVarKey] = []
    seen_hairs: set[frozenset[int]] = set()
    for key in keys:
        if hairs[key] not in seen_hairs:
            seen_hairs.add(hairs[key])
            reps.append(key)
    # Edges with identical incidence rows collapse to their tightest bound.
    pattern_cap: dict[tuple[int, ...], Fraction] = {}
    for e in scope:
        cols = tuple(j for j, key in enumerate(reps) if e in hairs[key])
        if not cols:
            continue
        cap = Fraction(capacity[e]) if capacity is not None else graph.weight(e)
        old = pattern_cap.get(cols)
        if old is None or cap < old:
            pattern_cap[cols] = cap
    rows = []
    bounds = []
    for cols in sorted(pattern_cap):
        row = [ZERO] * len(reps)
        for j in cols:
            row[j] = Fraction(1)
        rows.append(row)
        bounds.append(pattern_cap[cols])
    objective = [Fraction(1)] * len(reps)
    _, solution = simplex.maximize(objective, rows, bounds)
    return {k: v for k, v in zip(reps, solution) if v > 0}
