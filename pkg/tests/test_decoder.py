import random
from fractions import Fraction

import pytest

from parityfactor.decoder import (
    Certificate,
    DecoderConfig,
    decode,
    verify_certificate,
)
from parityfactor.dual import SubgraphRef
from parityfactor.hypergraph import build_hypergraph, defects_of
from parityfactor.oracle import InfeasibleSyndrome, brute_force_mwpf

from conftest import random_instance

F = Fraction


def ref(vertices, edges=()):
    return SubgraphRef(tuple(vertices), tuple(edges))


class TestConfig:
    def test_rejects_negative_limit(self):
        with pytest.raises(ValueError):
            DecoderConfig(cluster_limit=-1)

    def test_rejects_unknown_finder(self):
        with pytest.raises(ValueError):
            DecoderConfig(finders=("magic",))

    def test_rejects_unknown_stage(self):
        with pytest.raises(ValueError):
            DecoderConfig(stage="polish")


class TestGoldenDecodes:
    def test_f1_certified_weight_3(self, f1):
        cert = decode(f1, [3])
        assert cert.pattern == (0, 1, 2)
        assert cert.primal_weight == 3
        assert cert.dual_objective == 3
        assert cert.gap == 0
        assert cert.certified
        # optimal dual: the singleton over the defect plus the two
        # edge-complement subgraphs, one unit each
        assert cert.dual == {
            ref({3}): 1,
            ref(range(4), {0, 2}): 1,
            ref(range(4), {1, 2}): 1,
        }

    def test_f2_triangle(self, f2):
        cert = decode(f2, [0, 1])
        assert cert.pattern == (0,)
        assert cert.primal_weight == 1
        assert cert.certified

    def test_f3_nullity_finder(self, f3):
        cert = decode(f3, [0], DecoderConfig(finders=("nullity-le1", "single-hair")))
        assert cert.pattern == (0,)
        assert cert.primal_weight == 2
        assert cert.dual_objective == 2
        assert cert.certified

    def test_empty_syndrome(self, f1):
        cert = decode(f1, [])
        assert cert.pattern == ()
        assert cert.gap == 0 and cert.certified

    def test_zero_weight_edge_merged_at_init(self):
        g = build_hypergraph(3, [({0, 1}, F(0)), ({1, 2}, F(1)), ({0}, F(1))])
        cert = decode(g, [0])
        assert defects_of(g, cert.pattern) == {0}
        assert cert.certified

    def test_infeasible_syndrome(self):
        g = build_hypergraph(2, [({0}, F(1))])
        with pytest.raises(InfeasibleSyndrome):
            decode(g, [1])

    def test_search_only_stage(self, f1):
        cert = decode(f1, [3], DecoderConfig(stage="search-only"))
        assert defects_of(f1, cert.pattern) == {3}
        assert cert.gap >= 0
        assert cert.stats["finder_invocations"] == 0

    def test_deterministic(self, f1):
        a = decode(f1, [3])
        b = decode(f1, [3])
        assert a.pattern == b.pattern and a.dual == b.dual


class TestHufMode:
    def test_no_finder_invocations(self):
        rng = random.Random(13)
        for _ in range(60):
            graph, syndrome = random_instance(rng)
            cert = decode(graph, syndrome, DecoderConfig(cluster_limit=0))
            assert cert.stats["finder_invocations"] == 0
            assert defects_of(graph, cert.pattern) == syndrome
            assert cert.gap >= 0
            # every dual key is a growth subgraph: its edges are a subset of
            # the edges inside its own vertex span
            for key in cert.dual:
                assert set(key.edges) <= graph.edges_within(key.vertices)

    def test_f1_huf_has_gap(self, f1):
        cert = decode(f1, [3], DecoderConfig(cluster_limit=0))
        assert cert.primal_weight == 3
        assert cert.dual_objective == 2
        assert cert.gap == 1
        assert not cert.certified
        ok, _ = verify_certificate(f1, [3], cert)
        assert ok


class TestClusterLimit:
    def test_c_monotonicity_random(self):
        rng = random.Random(77)
        for _ in range(40):
            graph, syndrome = random_instance(rng)
            gaps = [
                decode(graph, syndrome, DecoderConfig(cluster_limit=c)).gap
                for c in (0, 2, None)
            ]
            assert gaps[0] >= gaps[1] >= gaps[2]

    def test_freeze_counted(self, f1):
        cert = decode(f1, [3], DecoderConfig(cluster_limit=2))
        assert cert.stats["clusters_frozen"] >= 1
        assert cert.gap >= 0


class TestPriorityFormula:
    def test_example_score(self):
        # dual 2, local weight 3, |E_C| = 3, |B_C| = 2 -> (2-3)/125
        from parityfactor.decoder import _Cluster, _DecodeState
        g = build_hypergraph(4, [({0, 1}, F(1)), ({1, 2}, F(1)), ({2, 3}, F(1))])
        state = _DecodeState(g, frozenset({0, 3}), DecoderConfig())
        cluster = _Cluster({0, 1, 2, 3})
        cluster.tight = {0, 1, 2}
        cluster.best_pattern = frozenset({0, 1, 2})
        cluster.best_weight = F(3)
        for key in (ref({0}), ref({0, 1}, {0})):
            cluster.keys.add(key)
            state.dual.set_value(key, F(1))
        rank, score, _ = state._priority(cluster)
        assert rank == 1
        assert score == F(-1, 125)

    def test_locally_optimal_scores_zero(self):
        from parityfactor.decoder import _Cluster, _DecodeState
        g = build_hypergraph(2, [({0, 1}, F(1))])
        state = _DecodeState(g, frozenset({0, 1}), DecoderConfig())
        cluster = _Cluster({0, 1})
        cluster.tight = {0}
        cluster.best_pattern = frozenset({0})
        cluster.best_weight = F(1)
        key = ref({0})
        cluster.keys.add(key)
        state.dual.set_value(key, F(1))
        rank, score, _ = state._priority(cluster)
        assert score == 0

    def test_larger_cluster_scores_closer_to_zero(self):
        # same gap, larger denominator -> less urgent (closer to zero)
        small = (F(2) - F(3)) / F(5 ** 3)
        large = (F(2) - F(3)) / F(9 ** 3)
        assert small < large < 0


class TestVerifyCertificate:
    def test_golden_passes(self, f1):
        cert = decode(f1, [3])
        ok, failures = verify_certificate(f1, [3], cert)
        assert ok and not failures

    def test_valid_dual_key_rejected(self, f1):
        cert = decode(f1, [3])
        bad_dual = dict(cert.dual)
        bad_dual[ref(range(4), range(3))] = F(1, 7)  # the full graph is valid
        tampered = Certificate(
            pattern=cert.pattern,
            primal_weight=cert.primal_weight,
            dual=bad_dual,
            dual_objective=cert.dual_objective + F(1, 7),
            gap=cert.gap - F(1, 7),
            certified=False,
            stats={},
        )
        ok, failures = verify_certificate(f1, [3], tampered)
        assert not ok
        assert any("not an invalid subgraph" in f for f in failures)

    def test_tampered_primal_weight(self, f1):
        cert = decode(f1, [3])
        tampered = Certificate(
            pattern=cert.pattern,
            primal_weight=cert.primal_weight + 1,
            dual=cert.dual,
            dual_objective=cert.dual_objective,
            gap=cert.gap,
            certified=cert.certified,
            stats={},
        )
        ok, failures = verify_certificate(f1, [3], tampered)
        assert not ok
        assert any("arithmetic" in f for f in failures)

    def test_wrong_pattern_parity(self, f1):
        cert = decode(f1, [3])
        tampered = Certificate(
            pattern=(2,),
            primal_weight=F(1),
            dual=cert.dual,
            dual_objective=cert.dual_objective,
            gap=F(1) - cert.dual_objective,
            certified=False,
            stats={},
        )
        ok, failures = verify_certificate(f1, [3], tampered)
        assert not ok

    def test_overloaded_dual_edge(self, f1):
        tampered = Certificate(
            pattern=(0, 1, 2),
            primal_weight=F(3),
            dual={ref({3}): F(2)},
            dual_objective=F(2),
            gap=F(1),
            certified=False,
            stats={},
        )
        ok, failures = verify_certificate(f1, [3], tampered)
        assert not ok
        assert any("constraint violated" in f for f in failures)


class TestAgainstOracle:
    def test_sweep_with_invariants(self):
        rng = random.Random(4321)
        for _ in range(120):
            graph, syndrome = random_instance(rng)
            cert = decode(graph, syndrome, DecoderConfig(check_invariants=True))
            assert defects_of(graph, cert.pattern) == syndrome
            assert cert.gap >= 0
            ok, failures = verify_certificate(graph, syndrome, cert)
            assert ok, failures
            if cert.certified:
                assert cert.primal_weight == brute_force_mwpf(graph, syndrome)[1]

    def test_preprocessed_negative_weights_round_trip(self):
        from parityfactor.hypergraph import (
            postprocess_pattern,
            preprocess_negative_weights,
        )
        rng = random.Random(6)
        for _ in range(30):
            nv = rng.randint(1, 6)
            ne = rng.randint(1, 7)
            signed = [
                (rng.sample(range(nv), rng.randint(1, min(3, nv))),
                 F(rng.randint(-5, 5)))
                for _ in range(ne)
            ]
            truth = frozenset(e for e in range(ne) if rng.random() < 0.4)
            abs_graph = build_hypergraph(nv, [(v, abs(w)) for v, w in signed])
            syndrome = defects_of(abs_graph, truth)
            graph, fixed, flips = preprocess_negative_weights(signed, nv, syndrome)
            cert = decode(graph, fixed)
            recovered = postprocess_pattern(cert.pattern, flips)
            assert defects_of(graph, recovered) == syndrome
