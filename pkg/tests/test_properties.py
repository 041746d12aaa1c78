"""Property-based tests for the solver invariants."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from parityfactor.decoder import DecoderConfig, decode, verify_certificate
from parityfactor.gf2 import parity_matrix_rref
from parityfactor.hypergraph import build_hypergraph, defects_of, weight_of
from parityfactor.oracle import EnumerationOverflow, brute_force_mwpf

F = Fraction


@st.composite
def hypergraphs(draw, max_vertices=7, max_edges=9, max_weight=8):
    nv = draw(st.integers(1, max_vertices))
    ne = draw(st.integers(1, max_edges))
    edges = []
    for _ in range(ne):
        degree = draw(st.integers(1, min(4, nv)))
        verts = draw(st.sets(st.integers(0, nv - 1),
                             min_size=degree, max_size=degree))
        weight = F(draw(st.integers(0, max_weight)))
        edges.append((verts, weight))
    return build_hypergraph(nv, edges)


@st.composite
def instances(draw):
    graph = draw(hypergraphs())
    pattern = draw(st.sets(st.integers(0, graph.edge_count - 1)))
    return graph, defects_of(graph, pattern)


@given(instances(), st.sets(st.integers(0, 8)), st.sets(st.integers(0, 8)))
@settings(max_examples=150, deadline=None)
def test_defects_xor_linearity(instance, a, b):
    graph, _ = instance
    a = {e for e in a if e < graph.edge_count}
    b = {e for e in b if e < graph.edge_count}
    assert defects_of(graph, a ^ b) == defects_of(graph, a) ^ defects_of(graph, b)


@given(instances())
@settings(max_examples=150, deadline=None)
def test_decode_parity_weak_duality_and_instrumented_invariants(instance):
    graph, syndrome = instance
    cert = decode(graph, syndrome, DecoderConfig(check_invariants=True))
    assert defects_of(graph, cert.pattern) == syndrome
    assert cert.gap >= 0
    assert cert.primal_weight == weight_of(graph, cert.pattern)
    ok, failures = verify_certificate(graph, syndrome, cert)
    assert ok, failures


@given(instances())
@settings(max_examples=100, deadline=None)
def test_certified_matches_oracle(instance):
    graph, syndrome = instance
    cert = decode(graph, syndrome)
    try:
        _, best = brute_force_mwpf(graph, syndrome)
    except EnumerationOverflow:
        return
    assert cert.dual_objective <= best
    if cert.certified:
        assert cert.primal_weight == best


@given(instances())
@settings(max_examples=80, deadline=None)
def test_dual_objective_never_exceeds_any_parity_factor(instance):
    # weak duality against the ground-truth pattern family, not just the best
    graph, syndrome = instance
    cert = decode(graph, syndrome)
    from parityfactor.oracle import enumerate_parity_factors
    try:
        patterns = enumerate_parity_factors(
            graph, range(graph.vertex_count), range(graph.edge_count),
            syndrome, free_var_cap=10)
    except EnumerationOverflow:
        return
    for pattern in patterns:
        assert cert.dual_objective <= weight_of(graph, pattern)


@given(instances(), st.integers(0, 3))
@settings(max_examples=80, deadline=None)
def test_cluster_limit_monotone_gap(instance, c):
    graph, syndrome = instance
    tight = decode(graph, syndrome, DecoderConfig(cluster_limit=c)).gap
    loose = decode(graph, syndrome, DecoderConfig(cluster_limit=c + 1)).gap
    unbounded = decode(graph, syndrome).gap
    assert tight >= loose >= unbounded


@given(hypergraphs(), st.data())
@settings(max_examples=100, deadline=None)
def test_nullity_hereditary(graph, data):
    matrix = parity_matrix_rref(
        graph, range(graph.vertex_count), range(graph.edge_count), ())
    if matrix.nullity > 1:
        # shrink to a nullity<=1 subgraph first
        free = [matrix.column_edges[j] for j in matrix.free_columns()]
        keep = sorted(set(range(graph.edge_count)) - set(free[1:]))
        edges = [(graph.edge_vertices(e), graph.weight(e)) for e in keep]
        if not edges:
            return
        graph = build_hypergraph(graph.vertex_count, edges)
        matrix = parity_matrix_rref(
            graph, range(graph.vertex_count), range(graph.edge_count), ())
    assert matrix.nullity <= 1
    drop = data.draw(st.sets(st.integers(0, graph.edge_count - 1)))
    keep_edges = sorted(set(range(graph.edge_count)) - drop)
    used = {v for e in keep_edges for v in graph.edge_vertices(e)}
    extra = data.draw(st.sets(st.integers(0, graph.vertex_count - 1)))
    vertices = used | extra
    if not vertices:
        return
    sub = parity_matrix_rref(graph, vertices, keep_edges, ())
    assert sub.nullity <= 1


@given(instances(), st.sampled_from(["single-hair", "union-find", "nullity-le1"]))
@settings(max_examples=100, deadline=None)
def test_every_finder_yields_valid_certificates(instance, finder):
    graph, syndrome = instance
    cert = decode(graph, syndrome,
                  DecoderConfig(finders=(finder,), check_invariants=True))
    assert defects_of(graph, cert.pattern) == syndrome
    assert cert.gap >= 0
