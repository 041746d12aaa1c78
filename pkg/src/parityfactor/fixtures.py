"""Canonical test fixtures shared by the test suite, docs and CLI examples."""

from __future__ import annotations

from fractions import Fraction

from .hypergraph import DecodingHypergraph, build_hypergraph

ONE = Fraction(1)


def fixture_f1() -> DecodingHypergraph:
    """Four vertices, three unit-weight edges, one of them a 3-edge.

    With syndrome {3} the unique parity factor is {e0, e1, e2} of weight 3,
    and the optimal dual also reaches 3: the smallest instance where dual
    variables need edge-set flexibility to certify.
    """
    return build_hypergraph(4, [
        ({0, 2}, ONE),
        ({0, 1}, ONE),
        ({1, 2, 3}, ONE),
    ])


def fixture_f2() -> DecodingHypergraph:
    """Unit-weight triangle: the smallest non-trivial simple graph."""
    return build_hypergraph(3, [
        ({0, 1}, ONE),
        ({1, 2}, ONE),
        ({2, 0}, ONE),
    ])


def fixture_f3() -> DecodingHypergraph:
    """Two parallel degree-1 edges on one vertex, weights 2 and 5 (nullity 1)."""
    return build_hypergraph(1, [
        ({0}, Fraction(2)),
        ({0}, Fraction(5)),
    ])


def fixture_f4() -> DecodingHypergraph:
    """Distance-3 repetition code: two checks, two boundary edges, one bulk edge."""
    return build_hypergraph(2, [
        ({0}, ONE),
        ({0, 1}, ONE),
        ({1}, ONE),
    ])


FIXTURES = {
    "f1": fixture_f1,
    "f2": fixture_f2,
    "f3": fixture_f3,
    "f4": fixture_f4,
}
