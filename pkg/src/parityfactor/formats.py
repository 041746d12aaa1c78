"""Problem and certificate file formats.

One self-describing JSON-shaped text format, canonicalized (sorted keys,
fixed separators, trailing newline) so serialization is byte-reproducible.
Rationals travel as strings like ``"3"`` or ``"1/3"`` to keep exactness out
of the float domain.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .decoder import Certificate
from .hypergraph import (
    DecodingHypergraph,
    HypergraphError,
    SubgraphRef,
    build_hypergraph,
    validate_syndrome,
)

PROBLEM_FORMAT = "parityfactor-problem"
CERTIFICATE_FORMAT = "parityfactor-certificate"
FORMAT_VERSION = 1


class FormatError(ValueError):
    """Raised for malformed problem or certificate files."""


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Any) -> Fraction:
    if not isinstance(text, str):
        raise FormatError(f"rational must be a string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed rational {text!r}") from exc


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def serialize_problem(
    graph: DecodingHypergraph,
    syndrome=None,
    metadata: dict | None = None,
) -> str:
    payload: dict[str, Any] = {
        "format": PROBLEM_FORMAT,
        "version": FORMAT_VERSION,
        "vertex_count": graph.vertex_count,
        "edges": [
            {
                "vertices": sorted(vertices),
                "weight": format_rational(weight),
            }
            for vertices, weight in graph.edges
        ],
    }
    if syndrome is not None:
        payload["syndrome"] = sorted(syndrome)
    if metadata:
        payload["metadata"] = metadata
    return _canonical(payload)


def parse_problem(text: str) -> tuple[DecodingHypergraph, frozenset[int] | None, dict]:
    """Parse a problem file; returns (graph, optional syndrome, metadata)."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != PROBLEM_FORMAT:
        raise FormatError("missing or wrong problem format tag")
    if payload.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version {payload.get('version')!r}")
    try:
        vertex_count = int(payload["vertex_count"])
        raw_edges = payload["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed problem file: {exc}") from exc
    edges = []
    for entry in raw_edges:
        if not isinstance(entry, dict) or "vertices" not in entry or "weight" not in entry:
            raise FormatError(f"malformed edge entry {entry!r}")
        vertices = entry["vertices"]
        if len(set(vertices)) != len(vertices):
            raise FormatError(f"edge repeats a vertex: {entry!r}")
        edges.append((vertices, parse_rational(entry["weight"])))
    try:
        graph = build_hypergraph(vertex_count, edges)
    except HypergraphError as exc:
        raise FormatError(str(exc)) from exc
    syndrome = None
    if "syndrome" in payload:
        try:
            syndrome = validate_syndrome(graph, payload["syndrome"])
        except (HypergraphError, TypeError) as exc:
            raise FormatError(f"malformed syndrome: {exc}") from exc
    metadata = payload.get("metadata") or {}
    return graph, syndrome, metadata


def serialize_certificate(certificate: Certificate) -> str:
    stats = {
        k: v for k, v in sorted(certificate.stats.items())
        if isinstance(v, (int, float, str))
    }
    payload = {
        "format": CERTIFICATE_FORMAT,
        "version": FORMAT_VERSION,
        "pattern": sorted(certificate.pattern),
        "primal_weight": format_rational(certificate.primal_weight),
        "dual_objective": format_rational(certificate.dual_objective),
        "gap": format_rational(certificate.gap),
        "certified": bool(certificate.certified),
        "dual": [
            {
                "vertices": list(key.vertices),
                "edges": list(key.edges),
                "y": format_rational(value),
            }
            for key, value in sorted(certificate.dual.items())
        ],
        "stats": stats,
    }
    return _canonical(payload)


def parse_certificate(text: str) -> Certificate:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CERTIFICATE_FORMAT:
        raise FormatError("missing or wrong certificate format tag")
    if payload.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version {payload.get('version')!r}")
    try:
        dual = {
            SubgraphRef(tuple(entry["vertices"]), tuple(entry["edges"])):
                parse_rational(entry["y"])
            for entry in payload["dual"]
        }
        return Certificate(
            pattern=tuple(sorted(payload["pattern"])),
            primal_weight=parse_rational(payload["primal_weight"]),
            dual=dual,
            dual_objective=parse_rational(payload["dual_objective"]),
            gap=parse_rational(payload["gap"]),
            certified=bool(payload["certified"]),
            stats=payload.get("stats") or {},
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed certificate: {exc}") from exc
