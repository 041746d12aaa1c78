"""Deterministic syndrome sampling with a counter-based generator.

The generator is SplitMix64 (Vigna's public-domain mixer): output i of the
stream seeded with s is mix64(s + (i+1) * GOLDEN_GAMMA) over 64-bit words.
Being a pure function of (seed, counter) it is reproducible across platforms
and languages; the reference test vectors are frozen in the test suite.
Edge inclusion against a rational probability is decided by exact integer
comparison, never by float rounding.
"""

from __future__ import annotations

from fractions import Fraction

from .hypergraph import DecodingHypergraph, HypergraphError, defects_of

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed: int, counter: int) -> int:
    """The counter-th output of the SplitMix64 stream for this seed."""
    z = (seed + (counter + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def bernoulli(seed: int, counter: int, p: Fraction) -> bool:
    """Exact Bernoulli(p) draw: true iff the draw falls below p * 2^64."""
    u = splitmix64(seed, counter)
    return u * p.denominator < p.numerator << 64


def sample_syndromes(
    graph: DecodingHypergraph,
    error_rate: Fraction,
    shots: int,
    seed: int,
) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Draw i.i.d. error patterns and their syndromes.

    Each edge is included independently with probability ``error_rate``;
    shot s consumes counters [s*|E|, (s+1)*|E|), so any shot can be
    regenerated in isolation.  Returns (ground-truth pattern, syndrome)
    pairs.
    """
    p = Fraction(error_rate)
    if not 0 <= p <= 1:
        raise HypergraphError(f"error rate must be in [0, 1], got {p}")
    out = []
    ne = graph.edge_count
    for shot in range(shots):
        base = shot * ne
        pattern = frozenset(
            e for e in range(ne) if bernoulli(seed, base + e, p))
        out.append((pattern, defects_of(graph, pattern)))
    return out
