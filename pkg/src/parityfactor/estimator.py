"""Estimator-style front end so the decoder composes with sklearn-ish tooling.

``ParityFactorDecoder`` follows the fit/predict protocol: ``fit`` binds a
problem instance (a hypergraph), ``decode`` certifies a single syndrome and
``predict`` maps a batch of syndromes to correction patterns.  ``get_params``
and ``set_params`` follow the sklearn parameter conventions so instances can
be cloned and grid-searched without importing sklearn here.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .decoder import Certificate, DecoderConfig, decode
from .hypergraph import DecodingHypergraph, HypergraphError, validate_syndrome


def check_problem(problem: DecodingHypergraph) -> DecodingHypergraph:
    """Validate a fitted problem instance."""
    if not isinstance(problem, DecodingHypergraph):
        raise TypeError(
            "expected a DecodingHypergraph; build one with build_hypergraph() "
            "or parse a problem file")
    for eid in range(problem.edge_count):
        if problem.weight(eid) < 0:
            raise HypergraphError(
                f"edge {eid} has negative weight; run preprocess_negative_weights")
    return problem


def check_syndromes(
    problem: DecodingHypergraph, syndromes: Iterable[Iterable[int]]
) -> list[frozenset[int]]:
    """Validate a batch of syndromes against a problem."""
    return [validate_syndrome(problem, s) for s in syndromes]


class ParityFactorDecoder:
    """Certifying minimum-weight parity factor decoder.

    Parameters mirror :class:`DecoderConfig`: ``cluster_limit`` is the
    per-cluster hyperblossom budget (None = unbounded, 0 = union-find mode),
    ``finders`` the ordered relaxer-finder names, ``free_var_cap`` the
    enumeration cap for cluster-local optima, ``stage`` either
    ``"search-refine"`` or ``"search-only"``.

    >>> from parityfactor.fixtures import fixture_f1
    >>> dec = ParityFactorDecoder().fit(fixture_f1())
    >>> dec.decode([3]).certified
    True
    """

    def __init__(
        self,
        cluster_limit: int | None = None,
        finders: Sequence[str] = ("single-hair",),
        free_var_cap: int = 16,
        stage: str = "search-refine",
        check_invariants: bool = False,
    ):
        self.cluster_limit = cluster_limit
        self.finders = finders
        self.free_var_cap = free_var_cap
        self.stage = stage
        self.check_invariants = check_invariants

    # -- sklearn-style parameter protocol --------------------------------

    def get_params(self, deep: bool = True) -> dict:
        return {
            "cluster_limit": self.cluster_limit,
            "finders": self.finders,
            "free_var_cap": self.free_var_cap,
            "stage": self.stage,
            "check_invariants": self.check_invariants,
        }

    def set_params(self, **params) -> "ParityFactorDecoder":
        valid = self.get_params()
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _config(self) -> DecoderConfig:
        return DecoderConfig(
            cluster_limit=self.cluster_limit,
            finders=tuple(self.finders),
            free_var_cap=self.free_var_cap,
            stage=self.stage,
            check_invariants=self.check_invariants,
        )

    # -- fit / decode / predict -------------------------------------------

    def fit(self, problem: DecodingHypergraph, y=None) -> "ParityFactorDecoder":
        """Bind the decoder to a problem instance."""
        self._config()  # validate parameters eagerly
        self.problem_ = check_problem(problem)
        return self

    def decode(self, syndrome: Iterable[int]) -> Certificate:
        """Decode one syndrome into a full certificate."""
        self._require_fitted()
        return decode(self.problem_, syndrome, self._config())

    def predict(self, syndromes: Iterable[Iterable[int]]) -> list[tuple[int, ...]]:
        """Correction patterns for a batch of syndromes."""
        self._require_fitted()
        checked = check_syndromes(self.problem_, syndromes)
        return [self.decode(s).pattern for s in checked]

    def _require_fitted(self) -> None:
        if not hasattr(self, "problem_"):
            raise RuntimeError("decoder is not fitted; call fit(problem) first")
