import random
from fractions import Fraction

import pytest

from parityfactor.fixtures import fixture_f1, fixture_f2, fixture_f3, fixture_f4
from parityfactor.hypergraph import DecodingHypergraph, build_hypergraph, defects_of


@pytest.fixture
def f1() -> DecodingHypergraph:
    return fixture_f1()


@pytest.fixture
def f2() -> DecodingHypergraph:
    return fixture_f2()


@pytest.fixture
def f3() -> DecodingHypergraph:
    return fixture_f3()


@pytest.fixture
def f4() -> DecodingHypergraph:
    return fixture_f4()


def random_instance(
    rng: random.Random,
    max_vertices: int = 8,
    max_edges: int = 10,
    max_degree: int = 4,
    max_weight: int = 10,
    pattern_rate: float = 0.4,
):
    """A random small hypergraph plus a satisfiable syndrome.

    The syndrome comes from the defects of a random ground-truth pattern, so
    a parity factor always exists.
    """
    nv = rng.randint(1, max_vertices)
    ne = rng.randint(1, max_edges)
    edges = []
    for _ in range(ne):
        degree = rng.randint(1, min(max_degree, nv))
        edges.append((rng.sample(range(nv), degree), Fraction(rng.randint(1, max_weight))))
    graph = build_hypergraph(nv, edges)
    pattern = frozenset(e for e in range(ne) if rng.random() < pattern_rate)
    return graph, defects_of(graph, pattern)


def random_nullity_le1_instance(rng: random.Random, max_checks: int = 7):
    """A random hypergraph with incidence nullity <= 1 and a satisfiable syndrome.

    Built from an invertible-ish construction: start from a random graph and
    delete edges until the nullity drops to at most 1.
    """
    from parityfactor.gf2 import parity_matrix_rref

    while True:
        graph, syndrome = random_instance(rng, max_vertices=max_checks,
                                          max_edges=max_checks + 1)
        matrix = parity_matrix_rref(
            graph, range(graph.vertex_count), range(graph.edge_count), ())
        if matrix.nullity <= 1:
            return graph, syndrome
        # drop free edges until at most one remains
        free = [matrix.column_edges[j] for j in matrix.free_columns()]
        keep = sorted(set(range(graph.edge_count)) - set(free[1:]))
        edges = [(graph.edge_vertices(e), graph.weight(e)) for e in keep]
        used = sorted({v for verts, _ in edges for v in verts})
        if not used:
            continue
        remap = {v: i for i, v in enumerate(used)}
        rebuilt = build_hypergraph(
            len(used), [({remap[v] for v in verts}, w) for verts, w in edges])
        pattern = frozenset(
            e for e in range(rebuilt.edge_count) if rng.random() < 0.4)
        return rebuilt, defects_of(rebuilt, pattern)
