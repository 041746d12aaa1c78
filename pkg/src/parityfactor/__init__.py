"""Certifying minimum-weight parity factor decoding for QEC hypergraphs."""

from .decoder import Certificate, DecoderConfig, decode, verify_certificate
from .estimator import ParityFactorDecoder
from .hypergraph import (
    DecodingHypergraph,
    HypergraphError,
    SubgraphRef,
    Weight,
    build_hypergraph,
    defects_of,
    edge_weight_from_probability,
    preprocess_negative_weights,
    postprocess_pattern,
    weight_of,
)
from .oracle import (
    EnumerationOverflow,
    InfeasibleSyndrome,
    brute_force_mwpf,
    enumerate_parity_factors,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "DecoderConfig",
    "DecodingHypergraph",
    "EnumerationOverflow",
    "HypergraphError",
    "InfeasibleSyndrome",
    "ParityFactorDecoder",
    "SubgraphRef",
    "Weight",
    "brute_force_mwpf",
    "build_hypergraph",
    "decode",
    "defects_of",
    "edge_weight_from_probability",
    "enumerate_parity_factors",
    "preprocess_negative_weights",
    "postprocess_pattern",
    "verify_certificate",
    "weight_of",
]
