"""Decoding-hypergraph generators for standard code-capacity benchmarks.

All generators use uniform edge weights (identical error probability per
source leaves the minimization unchanged under weight scaling), and they
assert the structural counts they promise instead of hard-coding incidence
tables.
"""

from __future__ import annotations

from fractions import Fraction

from .gf2 import parity_matrix_rref
from .hypergraph import DecodingHypergraph, HypergraphError, build_hypergraph

ONE = Fraction(1)


def _check_distance(d: int) -> None:
    if d < 3 or d % 2 == 0:
        raise HypergraphError(f"distance must be an odd integer >= 3, got {d}")


def repetition_code(d: int, weight: Fraction = ONE) -> DecodingHypergraph:
    """Repetition-code decoding graph: a path of d-1 checks with two
    degree-1 boundary edges and d-2 bulk edges."""
    _check_distance(d)
    edges: list[tuple[set[int], Fraction]] = [({0}, weight)]
    for i in range(d - 2):
        edges.append(({i, i + 1}, weight))
    edges.append(({d - 2}, weight))
    return build_hypergraph(d - 1, edges)


def _rotated_surface_plaquettes(d: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Kept Z- and X-plaquette coordinates of the rotated surface code.

    Plaquette (r, c) covers the data qubits {r, r+1} x {c, c+1}; bulk
    plaquettes alternate type in checkerboard fashion, and each boundary
    hosts alternating half-plaquettes of a single type (X on top/bottom,
    Z on left/right).
    """
    z_plaquettes: list[tuple[int, int]] = []
    x_plaquettes: list[tuple[int, int]] = []
    for r in range(-1, d):
        for c in range(-1, d):
            bulk = 0 <= r <= d - 2 and 0 <= c <= d - 2
            is_z = (r + c) % 2 == 0
            if bulk:
                (z_plaquettes if is_z else x_plaquettes).append((r, c))
                continue
            top_bottom = (r in (-1, d - 1)) and 0 <= c <= d - 2
            left_right = (c in (-1, d - 1)) and 0 <= r <= d - 2
            if top_bottom and not is_z:
                x_plaquettes.append((r, c))
            elif left_right and is_z:
                z_plaquettes.append((r, c))
    return sorted(z_plaquettes), sorted(x_plaquettes)


def _plaquette_qubits(r: int, c: int, d: int) -> list[tuple[int, int]]:
    return [
        (rr, cc)
        for rr in (r, r + 1)
        for cc in (c, c + 1)
        if 0 <= rr < d and 0 <= cc < d
    ]


def surface_code_bitflip(d: int, weight: Fraction = ONE) -> DecodingHypergraph:
    """Z-check decoding graph of the rotated surface code under bit-flip noise.

    A simple graph: (d^2 - 1)/2 check vertices, d^2 data-qubit edges of
    degree 1 (boundary) or 2 (bulk).
    """
    _check_distance(d)
    z_plaquettes, _ = _rotated_surface_plaquettes(d)
    index = {pos: i for i, pos in enumerate(z_plaquettes)}
    edges = []
    for qr in range(d):
        for qc in range(d):
            checks = {
                index[(pr, pc)]
                for pr in (qr - 1, qr)
                for pc in (qc - 1, qc)
                if (pr, pc) in index and (qr, qc) in _plaquette_qubits(pr, pc, d)
            }
            if not 1 <= len(checks) <= 2:
                raise HypergraphError(
                    f"surface layout error: qubit ({qr},{qc}) touches "
                    f"{len(checks)} Z checks")
            edges.append((checks, weight))
    graph = build_hypergraph(len(z_plaquettes), edges)
    if graph.vertex_count != (d * d - 1) // 2 or graph.edge_count != d * d:
        raise HypergraphError("surface layout error: check/qubit counts are off")
    return graph


def surface_code_biased_y(d: int, weight: Fraction = ONE) -> DecodingHypergraph:
    """Y-noise decoding hypergraph of the rotated surface code.

    Every Y error flips both check types it touches, so each of the d^2
    hyperedges spans the Z and X checks of one data qubit; all d^2 - 1
    checks are vertices.  The incidence matrix must have nullity exactly 1,
    which is asserted rather than assumed.
    """
    _check_distance(d)
    z_plaquettes, x_plaquettes = _rotated_surface_plaquettes(d)
    plaquettes = [(pos, "z") for pos in z_plaquettes] + [(pos, "x") for pos in x_plaquettes]
    index = {pos: i for i, (pos, _) in enumerate(plaquettes)}
    edges = []
    for qr in range(d):
        for qc in range(d):
            checks = {
                index[(pr, pc)]
                for pr in (qr - 1, qr)
                for pc in (qc - 1, qc)
                if (pr, pc) in index and (qr, qc) in _plaquette_qubits(pr, pc, d)
            }
            if not checks:
                raise HypergraphError(
                    f"surface layout error: qubit ({qr},{qc}) touches no checks")
            edges.append((checks, weight))
    graph = build_hypergraph(len(plaquettes), edges)
    if graph.vertex_count != d * d - 1 or graph.edge_count != d * d:
        raise HypergraphError("surface layout error: check/qubit counts are off")
    matrix = parity_matrix_rref(
        graph, range(graph.vertex_count), range(graph.edge_count), ())
    if matrix.nullity != 1:
        raise HypergraphError(
            f"surface layout error: biased-Y nullity is {matrix.nullity}, expected 1")
    return graph


GENERATORS = {
    "repetition": repetition_code,
    "surface-bitflip": surface_code_bitflip,
    "surface-biasedy": surface_code_biased_y,
}


def generate_code(kind: str, d: int, weight: Fraction = ONE) -> DecodingHypergraph:
    try:
        generator = GENERATORS[kind]
    except KeyError:
        raise HypergraphError(
            f"unknown code kind {kind!r}; choices: {sorted(GENERATORS)}") from None
    return generator(d, weight)
