import itertools
import random
from fractions import Fraction

import pytest

from parityfactor.gf2 import is_invalid, parity_matrix_rref
from parityfactor.hypergraph import HypergraphError, build_hypergraph, defects_of

from conftest import random_instance


def brute_solutions(graph, vertices, edges, syndrome):
    """Exhaustive reference: all patterns within the edge subset matching the
    partial syndrome."""
    vset = set(vertices)
    target = frozenset(syndrome) & vset
    edges = sorted(edges)
    out = []
    for r in range(len(edges) + 1):
        for combo in itertools.combinations(edges, r):
            if defects_of(graph, combo) & vset == target:
                out.append(frozenset(combo))
    return out


class TestRref:
    def test_f1_full_identity(self, f1):
        m = parity_matrix_rref(f1, range(4), range(3), {3})
        syn = m.syndrome_bit
        assert m.rows == (0b001 | syn, 0b010 | syn, 0b100 | syn)
        assert m.pivot_columns == (0, 1, 2)
        assert m.nullity == 0

    def test_no_edges_one_defect(self, f1):
        m = parity_matrix_rref(f1, {3}, (), {3})
        assert m.has_contradiction
        assert m.rows == (m.syndrome_bit,)

    def test_parallel_edges_free_variable(self):
        g = build_hypergraph(1, [({0}, Fraction(1)), ({0}, Fraction(1))])
        m = parity_matrix_rref(g, {0}, {0, 1}, {0})
        assert m.rows == (0b011 | m.syndrome_bit,)
        assert m.nullity == 1
        assert m.free_columns() == [1]

    def test_column_order_not_permutation(self, f1):
        with pytest.raises(HypergraphError):
            parity_matrix_rref(f1, range(4), range(3), {3}, column_order=[0, 1, 1])

    def test_custom_column_order(self, f1):
        m = parity_matrix_rref(f1, range(4), range(3), {3}, column_order=[2, 0, 1])
        assert m.column_edges == (2, 0, 1)
        assert m.nullity == 0

    def test_row_addition_invariance(self):
        # The RREF solution set equals the exhaustive solution set.
        rng = random.Random(11)
        for _ in range(60):
            graph, syndrome = random_instance(rng, max_vertices=5, max_edges=7)
            matrix = parity_matrix_rref(
                graph, range(graph.vertex_count), range(graph.edge_count), syndrome)
            want = set(brute_solutions(
                graph, range(graph.vertex_count), range(graph.edge_count), syndrome))
            if matrix.has_contradiction:
                assert not want
                continue
            x0, masks = matrix.solution_masks()
            got = set()
            for k in range(1 << len(masks)):
                x = x0
                for j in range(len(masks)):
                    if k >> j & 1:
                        x ^= masks[j]
                got.add(matrix.columns_to_edges(x))
            assert got == want


class TestIsInvalid:
    def test_defect_without_edges(self, f1):
        assert is_invalid(f1, {3}, (), {3})

    def test_full_graph_valid(self, f1):
        assert not is_invalid(f1, range(4), range(3), {3})

    def test_empty_everything_valid(self, f1):
        assert not is_invalid(f1, {0}, (), set())

    def test_vertex_induced_subgraph_catalog(self, f1):
        # Every vertex-induced subgraph containing the defect is invalid
        # when restricted to its internal edges, for syndrome {3}.
        for extra in ([], [0], [1], [2], [0, 1], [0, 2], [1, 2]):
            vertices = {3, *extra}
            edges = f1.edges_within(vertices)
            assert is_invalid(f1, vertices, edges, {3})

    def test_agrees_with_exhaustive_search(self):
        rng = random.Random(23)
        for _ in range(80):
            graph, syndrome = random_instance(rng, max_vertices=6, max_edges=8)
            vertices = set(rng.sample(
                range(graph.vertex_count), rng.randint(1, graph.vertex_count)))
            within = sorted(graph.edges_within(vertices))
            edges = [e for e in within if rng.random() < 0.7]
            got = is_invalid(graph, vertices, edges, syndrome)
            want = not brute_solutions(graph, vertices, edges, syndrome)
            assert got == want


class TestNullityHereditary:
    def test_subgraphs_of_nullity_le1(self):
        from conftest import random_nullity_le1_instance
        rng = random.Random(31)
        for _ in range(40):
            graph, _ = random_nullity_le1_instance(rng)
            full = parity_matrix_rref(
                graph, range(graph.vertex_count), range(graph.edge_count), ())
            assert full.nullity <= 1
            for _ in range(5):
                keep_edges = [e for e in range(graph.edge_count) if rng.random() < 0.6]
                used = {v for e in keep_edges for v in graph.edge_vertices(e)}
                vertices = used | {
                    v for v in range(graph.vertex_count) if rng.random() < 0.3}
                if not vertices:
                    continue
                sub = parity_matrix_rref(graph, vertices, keep_edges, ())
                assert sub.nullity <= 1
