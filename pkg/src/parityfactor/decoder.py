"""The decoding driver: cluster lifecycle, search and refine stages, certificates.

A decode runs in two stages.  The search stage grows every invalid cluster's
canonical subgraph uniformly (an event queue over binding slacks) and merges
clusters until each admits a local parity factor.  The refine stage then
works cluster by cluster in priority order: relaxer finders peel tight edges,
a trivial growth direction is composed on top whenever the remainder is
invalid, and the restricted dual LP re-optimizes over the cluster's history.
The output is a certificate: a parity factor plus a feasible dual solution
whose objective gap upper-bounds the distance from optimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .dual import (
    DualSolution,
    DualVarKey,
    dual_objective,
    hair_of,
    solve_restricted_dlp,
)
from .gf2 import is_invalid
from .hypergraph import (
    DecodingHypergraph,
    HypergraphError,
    SubgraphRef,
    Weight,
    defects_of,
    validate_syndrome,
    weight_of,
)
from .oracle import (
    EnumerationOverflow,
    InfeasibleSyndrome,
    any_parity_factor,
    local_mwpf,
    pattern_sort_key,
)
from .relax import FINDERS, FinderContext, batched_relaxing, compose

ZERO = Fraction(0)
ONE = Fraction(1)

_REFINE_ITERATION_CAP = 100_000


class InternalConsistencyError(AssertionError):
    """An internal invariant failed; indicates a solver bug, not bad input."""


class InvariantRecorder:
    """Counts invariant checks and fails loudly on the first violation."""

    def __init__(self):
        self.counts: dict[str, int] = {}

    def record(self, name: str, ok: bool) -> None:
        if not ok:
            raise InternalConsistencyError(f"invariant violated: {name}")
        self.counts[name] = self.counts.get(name, 0) + 1

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DecoderConfig:
    """Decode-time knobs.

    ``cluster_limit`` is the per-cluster hyperblossom budget c (None means
    unbounded); with c = 0 no relaxer finder ever runs and the decoder
    degenerates to weighted hypergraph union-find growth.
    """

    cluster_limit: int | None = None
    finders: tuple[str, ...] = ("single-hair",)
    free_var_cap: int = 16
    stage: str = "search-refine"
    check_invariants: bool = False

    def __post_init__(self):
        if self.cluster_limit is not None and self.cluster_limit < 0:
            raise ValueError("cluster_limit must be non-negative or None")
        if self.stage not in ("search-refine", "search-only"):
            raise ValueError(f"unknown stage {self.stage!r}")
        for name in self.finders:
            if name not in FINDERS:
                raise ValueError(f"unknown relaxer finder {name!r}")


@dataclass(frozen=True)
class Certificate:
    """Decode output: parity factor, feasible dual, and the proven gap."""

    pattern: tuple[int, ...]
    primal_weight: Weight
    dual: dict[DualVarKey, Fraction]
    dual_objective: Weight
    gap: Weight
    certified: bool
    stats: dict


class _Cluster:
    __slots__ = (
        "vertices", "tight", "keys", "history", "best_pattern", "best_weight",
        "frozen", "stalled", "_valid", "_local",
    )

    def __init__(self, vertices: set[int]):
        self.vertices: set[int] = vertices
        self.tight: set[int] = set()
        self.keys: set[DualVarKey] = set()
        self.history: set[DualVarKey] = set()
        self.best_pattern: frozenset[int] | None = None
        self.best_weight: Weight | None = None
        self.frozen = False
        self.stalled = False
        self._valid: bool | None = None
        self._local: tuple[frozenset[int], Weight] | str | None = None

    def touch(self) -> None:
        self._valid = None
        self._local = None
        self.stalled = False

    def sort_token(self) -> int:
        return min(self.vertices)

    def offer_pattern(self, pattern: frozenset[int], weight: Weight) -> None:
        if (
            self.best_weight is None
            or weight < self.best_weight
            or (weight == self.best_weight
                and pattern_sort_key(pattern) < pattern_sort_key(self.best_pattern))
        ):
            self.best_pattern = pattern
            self.best_weight = weight


class _DecodeState:
    def __init__(self, graph: DecodingHypergraph, syndrome: frozenset[int],
                 config: DecoderConfig):
        self.graph = graph
        self.syndrome = syndrome
        self.config = config
        self.dual = DualSolution(graph)
        self.tight: set[int] = set()
        self.clusters: dict[int, _Cluster] = {}
        self.vertex_cluster: dict[int, int] = {}
        self._next_cid = 0
        self.checks = InvariantRecorder() if config.check_invariants else None
        self.stats: dict = {
            "search_rounds": 0,
            "refine_iterations": 0,
            "finder_invocations": 0,
            "relaxers_found": 0,
            "clusters_frozen": 0,
            "local_mwpf_overflows": 0,
        }

    # ----- cluster plumbing ---------------------------------------------

    def _new_cluster(self, vertices: set[int]) -> int:
        cid = self._next_cid
        self._next_cid += 1
        cluster = _Cluster(vertices)
        self.clusters[cid] = cluster
        for v in vertices:
            self.vertex_cluster[v] = cid
        return cid

    def _cluster_dual(self, cluster: _Cluster) -> Fraction:
        return sum((self.dual.value(k) for k in cluster.keys), ZERO)

    def _absorb_tight_edge(self, edge: int) -> None:
        """Merge everything connected to a newly tight edge into one cluster."""
        comp_edges: set[int] = set()
        comp_verts: set[int] = set()
        cids: set[int] = set()
        stack = [edge]
        while stack:
            e = stack.pop()
            if e in comp_edges:
                continue
            comp_edges.add(e)
            for v in self.graph.edge_vertices(e):
                cid = self.vertex_cluster.get(v)
                if cid is not None:
                    cids.add(cid)
                    continue
                if v in comp_verts:
                    continue
                comp_verts.add(v)
                for e2 in self.graph.adjacency[v]:
                    if e2 in self.tight and e2 not in comp_edges:
                        stack.append(e2)
        if cids:
            ordered = sorted(cids, key=lambda c: (-len(self.clusters[c].vertices), c))
            target_cid = ordered[0]
            target = self.clusters[target_cid]
            for cid in ordered[1:]:
                other = self.clusters.pop(cid)
                for v in other.vertices:
                    self.vertex_cluster[v] = target_cid
                target.vertices |= other.vertices
                target.tight |= other.tight
                target.keys |= other.keys
                target.history |= other.history
                # Clusters are vertex-disjoint, so the union of their parity
                # factors is a parity factor of the merged defect set.
                if target.best_pattern is not None and other.best_pattern is not None:
                    target.best_pattern = target.best_pattern | other.best_pattern
                    target.best_weight = target.best_weight + other.best_weight
                else:
                    target.best_pattern = None
                    target.best_weight = None
        else:
            target_cid = self._new_cluster(set())
            target = self.clusters[target_cid]
        for v in comp_verts:
            self.vertex_cluster[v] = target_cid
        target.vertices |= comp_verts
        target.tight |= comp_edges
        target.touch()
        if self.checks is not None:
            self._check_cluster_disjointness()

    def _on_new_tight(self, edges: Iterable[int]) -> None:
        for e in sorted(edges):
            self.tight.add(e)
        for e in sorted(edges):
            self._absorb_tight_edge(e)

    def _check_cluster_disjointness(self) -> None:
        seen_v: dict[int, int] = {}
        seen_e: dict[int, int] = {}
        seen_k: dict[DualVarKey, int] = {}
        for cid, cluster in self.clusters.items():
            ok = True
            for v in cluster.vertices:
                ok = ok and seen_v.setdefault(v, cid) == cid and self.vertex_cluster[v] == cid
            for e in cluster.tight:
                ok = ok and seen_e.setdefault(e, cid) == cid
                ok = ok and self.graph.edge_vertices(e) <= cluster.vertices
            for k in cluster.keys:
                ok = ok and seen_k.setdefault(k, cid) == cid
                ok = ok and set(k.vertices) <= cluster.vertices
            self.checks.record("cluster_disjointness", ok)
        for v in self.syndrome:
            self.checks.record("cluster_disjointness", v in self.vertex_cluster)

    # ----- validity and local optima --------------------------------------

    def _cluster_valid(self, cluster: _Cluster) -> bool:
        if cluster._valid is None:
            cluster._valid = not is_invalid(
                self.graph, cluster.vertices, cluster.tight, self.syndrome)
        return cluster._valid

    def _local_solution(self, cluster: _Cluster):
        """Cluster MWPF over its tight edges, or the string 'overflow'."""
        if cluster._local is None:
            try:
                pattern, weight = local_mwpf(
                    self.graph, cluster.vertices, cluster.tight, self.syndrome,
                    free_var_cap=self.config.free_var_cap)
            except EnumerationOverflow:
                cluster._local = "overflow"
                self.stats["local_mwpf_overflows"] += 1
            else:
                cluster._local = (pattern, weight)
                cluster.offer_pattern(pattern, weight)
        return cluster._local

    def _is_locally_optimal(self, cluster: _Cluster) -> bool:
        if not self._cluster_valid(cluster):
            return False
        local = self._local_solution(cluster)
        if local == "overflow":
            cluster.frozen = True
            return False
        _, weight = local
        return weight == self._cluster_dual(cluster)

    # ----- initialization --------------------------------------------------

    def initialize(self) -> None:
        for v in sorted(self.syndrome):
            cid = self._new_cluster({v})
            self.clusters[cid].history.add(SubgraphRef((v,), ()))
        zero_edges = self.graph.zero_weight_edges
        touching = [
            e for e in zero_edges
            if any(v in self.vertex_cluster for v in self.graph.edge_vertices(e))
        ]
        self.tight.update(zero_edges)
        for e in touching:
            self._absorb_tight_edge(e)

    # ----- search stage ------------------------------------------------------

    def search(self) -> None:
        while True:
            invalid = [
                (cid, c) for cid, c in sorted(
                    self.clusters.items(), key=lambda item: item[1].sort_token())
                if self.syndrome & c.vertices and not self._cluster_valid(c)
            ]
            if not invalid:
                return
            rates: dict[int, int] = {}
            growth: list[tuple[_Cluster, SubgraphRef, frozenset[int]]] = []
            for cid, cluster in invalid:
                key = SubgraphRef(tuple(cluster.vertices), tuple(cluster.tight))
                hair = hair_of(self.graph, key)
                if not hair:
                    raise InfeasibleSyndrome(
                        "an invalid cluster saturated its component: "
                        "the syndrome has no parity factor")
                growth.append((cluster, key, hair))
                for e in hair:
                    rates[e] = rates.get(e, 0) + 1
            length = None
            for e, rate in rates.items():
                candidate = self.dual.slack(e) / rate
                if length is None or candidate < length:
                    length = candidate
            if length <= 0:  # pragma: no cover - tight hairs are merged away
                raise InternalConsistencyError("search stage stalled at zero growth")
            for cluster, key, _hair in growth:
                self.dual.set_value(key, self.dual.value(key) + length)
                cluster.keys.add(key)
                cluster.history.add(key)
            newly_tight = sorted(
                e for e in rates if self.dual.slack(e) == 0)
            self._on_new_tight(newly_tight)
            self.stats["search_rounds"] += 1
            if self.checks is not None:
                for e in rates:
                    self.checks.record("dual_feasibility", self.dual.slack(e) >= 0)

    # ----- refine stage -------------------------------------------------------

    def _priority(self, cluster: _Cluster) -> tuple:
        """Ascending sort key: invalid clusters first, then the score
        (dual - primal) / (|E_C| + |B_C|)^3, ties by smallest vertex."""
        if not self._cluster_valid(cluster) or cluster.best_weight is None:
            return (0, ZERO, cluster.sort_token())
        size = len(cluster.tight) + len(cluster.keys)
        score = (self._cluster_dual(cluster) - cluster.best_weight) / (size ** 3)
        return (1, score, cluster.sort_token())

    def _finder_functions(self):
        return [FINDERS[name] for name in self.config.finders]

    def _count_invocation(self) -> None:
        self.stats["finder_invocations"] += 1

    def _primal_direction(self, cluster: _Cluster):
        """Batched relaxing plus a trivial growth direction, composed.

        Returns None when the cluster's remaining tight subgraph stays valid,
        in which case no progress is possible for it right now.
        """
        ctx = FinderContext(
            graph=self.graph,
            syndrome=self.syndrome,
            vertices=frozenset(cluster.vertices),
            tight_edges=frozenset(cluster.tight),
            hyperblossoms=tuple(sorted(cluster.keys)),
            dual_values={k: self.dual.value(k) for k in cluster.keys},
            checks=self.checks,
        )
        relaxers = batched_relaxing(
            ctx, self._finder_functions(),
            on_invocation=self._count_invocation,
            validate=self.config.check_invariants,
        )
        self.stats["relaxers_found"] += len(relaxers)
        remaining = cluster.tight - set().union(
            *(r.relaxed_edges for r in relaxers)) if relaxers else set(cluster.tight)
        if not is_invalid(self.graph, cluster.vertices, remaining, self.syndrome):
            return None
        trivial_key = SubgraphRef(tuple(cluster.vertices), tuple(remaining))
        direction = compose(
            self.graph, relaxers, {trivial_key: ONE}, cluster.tight)
        return direction

    def _dual_phase(self, cid: int, cluster: _Cluster,
                    direction: Mapping[DualVarKey, Fraction]) -> None:
        grown = sorted(k for k, d in direction.items() if d > 0)
        history_before = len(cluster.history)
        for key in grown:
            if not hair_of(self.graph, key):
                raise HypergraphError(
                    f"invalid subgraph {key} has empty hair: instance error")
            if self.checks is not None:
                self.checks.record(
                    "grown_keys_invalid",
                    is_invalid(self.graph, key.vertices, key.edges, self.syndrome))
            cluster.history.add(key)
        if self.checks is not None:
            self.checks.record(
                "history_monotonic", len(cluster.history) > history_before)
        scope = sorted(self.graph.edges_incident(cluster.vertices))
        cluster_load: dict[int, Fraction] = {}
        for key in cluster.keys:
            y = self.dual.value(key)
            for e in hair_of(self.graph, key):
                cluster_load[e] = cluster_load.get(e, ZERO) + y
        capacity = {
            e: self.graph.weight(e)
            - (self.dual.edge_contribution(e) - cluster_load.get(e, ZERO))
            for e in scope
        }
        old_objective = self._cluster_dual(cluster)
        solution = solve_restricted_dlp(
            self.graph, cluster.history, scope, capacity)
        new_objective = sum(solution.values(), ZERO)
        if new_objective <= old_objective:
            raise InternalConsistencyError(
                "restricted dual LP failed to improve: composition bug")
        for key in sorted(cluster.keys - set(solution)):
            self.dual.set_value(key, ZERO)
        for key in sorted(solution):
            self.dual.set_value(key, solution[key])
        cluster.keys = set(solution)
        untightened = sorted(
            e for e in cluster.tight if self.dual.slack(e) > 0)
        for e in untightened:
            self.tight.discard(e)
            cluster.tight.discard(e)
        newly_tight = sorted(
            e for e in scope
            if e not in self.tight and self.dual.slack(e) == 0)
        cluster.touch()
        self._on_new_tight(newly_tight)
        if self.checks is not None:
            for e in scope:
                self.checks.record("dual_feasibility", self.dual.slack(e) >= 0)

    def refine(self) -> None:
        if self.config.stage == "search-only":
            return
        limit = self.config.cluster_limit
        for _ in range(_REFINE_ITERATION_CAP):
            candidates: list[tuple[tuple, int, _Cluster]] = []
            for cid, cluster in self.clusters.items():
                if not (self.syndrome & cluster.vertices):
                    continue
                if limit is not None and not cluster.frozen \
                        and len(cluster.keys) >= limit:
                    cluster.frozen = True
                    self.stats["clusters_frozen"] += 1
                if cluster.frozen or cluster.stalled:
                    continue
                if cluster.best_weight is not None \
                        and cluster.best_weight == self._cluster_dual(cluster):
                    continue  # gap already zero; no direction can exist
                if self._is_locally_optimal(cluster):
                    continue
                if cluster.frozen:  # set by overflow in _is_locally_optimal
                    self.stats["clusters_frozen"] += 1
                    continue
                candidates.append((self._priority(cluster), cid, cluster))
            if not candidates:
                return
            candidates.sort(key=lambda item: (item[0], item[1]))
            _, cid, cluster = candidates[0]
            direction = self._primal_direction(cluster)
            if direction is None:
                cluster.stalled = True
                continue
            self._dual_phase(cid, cluster, direction)
            self.stats["refine_iterations"] += 1
        raise InternalConsistencyError("refine stage exceeded its iteration cap")

    # ----- assembly -------------------------------------------------------------

    def assemble(self, elapsed: dict) -> Certificate:
        pattern: set[int] = set()
        for _, cluster in sorted(
                self.clusters.items(), key=lambda item: item[1].sort_token()):
            if self._cluster_valid(cluster):
                local = self._local_solution(cluster)
                if local == "overflow" and cluster.best_pattern is None:
                    fallback = any_parity_factor(
                        self.graph, cluster.vertices, cluster.tight, self.syndrome)
                    cluster.offer_pattern(fallback, weight_of(self.graph, fallback))
            elif cluster.best_pattern is None:
                # A frozen cluster can end invalid over its tight edges after
                # a dual phase relaxed them.  The search stage proved a parity
                # factor exists inside the cluster's span, so fall back to it.
                fallback = any_parity_factor(
                    self.graph, cluster.vertices,
                    self.graph.edges_within(cluster.vertices), self.syndrome)
                cluster.offer_pattern(fallback, weight_of(self.graph, fallback))
            if cluster.best_pattern is None:  # pragma: no cover
                raise InternalConsistencyError("cluster finished without a pattern")
            pattern |= cluster.best_pattern
        primal = weight_of(self.graph, pattern)
        objective = dual_objective(self.dual)
        gap = primal - objective
        if defects_of(self.graph, pattern) != self.syndrome:
            raise InternalConsistencyError("output pattern does not match syndrome")
        if gap < 0:
            raise InternalConsistencyError("weak duality violated")
        stats = dict(self.stats)
        stats.update(elapsed)
        if self.checks is not None:
            stats["invariant_checks"] = dict(self.checks.counts)
        return Certificate(
            pattern=tuple(sorted(pattern)),
            primal_weight=primal,
            dual=dict(self.dual.values),
            dual_objective=objective,
            gap=gap,
            certified=gap == 0,
            stats=stats,
        )


def decode(
    graph: DecodingHypergraph,
    syndrome: Iterable[int],
    config: DecoderConfig | None = None,
) -> Certificate:
    """Decode a syndrome into a certified parity factor.

    Deterministic: the result is a pure function of (graph, syndrome, config).
    Raises :class:`InfeasibleSyndrome` when no parity factor exists.
    """
    config = config or DecoderConfig()
    defects = validate_syndrome(graph, syndrome)
    state = _DecodeState(graph, defects, config)
    t0 = time.perf_counter()
    state.initialize()
    state.search()
    t1 = time.perf_counter()
    state.refine()
    t2 = time.perf_counter()
    return state.assemble({
        "search_seconds": t1 - t0,
        "refine_seconds": t2 - t1,
    })


def verify_certificate(
    graph: DecodingHypergraph,
    syndrome: Iterable[int],
    certificate: Certificate,
) -> tuple[bool, list[str]]:
    """Independently re-check a certificate; returns (ok, failure report).

    Checks parity, dual feasibility including invalidity of every dual key,
    exact objective arithmetic, gap consistency, and the certified flag.
    """
    failures: list[str] = []
    defects = validate_syndrome(graph, syndrome)
    try:
        produced = defects_of(graph, certificate.pattern)
        if produced != defects:
            failures.append("pattern defects do not match the syndrome")
    except HypergraphError as exc:
        failures.append(f"pattern invalid: {exc}")
    contribution: dict[int, Fraction] = {}
    total = ZERO
    for key in sorted(certificate.dual):
        value = certificate.dual[key]
        if value <= 0:
            failures.append(f"dual value for {key} is not positive")
            continue
        try:
            key.validate(graph)
        except HypergraphError as exc:
            failures.append(f"dual key malformed: {exc}")
            continue
        if not is_invalid(graph, key.vertices, key.edges, defects):
            failures.append(f"dual key {key} is not an invalid subgraph")
        total += value
        for e in hair_of(graph, key):
            contribution[e] = contribution.get(e, ZERO) + value
    for e, value in sorted(contribution.items()):
        if value > graph.weight(e):
            failures.append(f"dual constraint violated on edge {e}")
    if total != certificate.dual_objective:
        failures.append("dual objective does not match the stored values")
    try:
        primal = weight_of(graph, certificate.pattern)
        if primal != certificate.primal_weight:
            failures.append("primal weight arithmetic mismatch")
    except HypergraphError:
        primal = None
    if certificate.gap != certificate.primal_weight - certificate.dual_objective:
        failures.append("gap arithmetic mismatch")
    if certificate.gap < 0:
        failures.append("negative gap: weak duality violated")
    if certificate.certified != (certificate.gap == 0):
        failures.append("certified flag inconsistent with the gap")
    return not failures, failures
