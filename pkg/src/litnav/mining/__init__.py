"""Deterministic data-mining library over the knowledge graph and embeddings.

Every operation here is a pure function with a total tie-break order, so
repeated runs on the same inputs are byte-identical. Ranked results are
plain lists of (id, score) pairs, scores non-increasing, ties id-ascending
unless a function documents a different secondary key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class MiningError(ValueError):
    pass


@dataclass(frozen=True)
class MiningParams:
    """Free parameters shared by the mining operations.

    All algorithms are seed-free; determinism comes from fixed sweep orders
    and tie-breaks, not from a seeded RNG.
    """

    k: Optional[int] = None
    tau_outlier: float = 0.10
    damping: float = 0.85
    tol: float = 1e-9
    max_iter: int = 100
    m_terms: int = 10

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise MiningError("k must be >= 1 when given")
        if not -1.0 <= self.tau_outlier < 1.0:
            raise MiningError("tau_outlier must lie in [-1, 1)")
        if not 0.0 < self.damping < 1.0:
            raise MiningError("damping must lie in (0, 1)")
        if self.tol <= 0.0:
            raise MiningError("tol must be positive")
        if self.max_iter < 1:
            raise MiningError("max_iter must be >= 1")
        if self.m_terms < 1:
            raise MiningError("m_terms must be >= 1")


DEFAULT_PARAMS = MiningParams()

from .topics import (  # noqa: E402
    TopicModel,
    build_topic_model,
    ctfidf_terms,
    default_k,
    doc_tokens,
    fit_topics,
    project_2d,
    representatives,
    topic_trend,
)
from .graphs import (  # noqa: E402
    KeywordStats,
    active_researchers,
    biblio_coupling,
    bridging_keywords,
    co_citation,
    communities,
    keyword_stats,
    pagerank,
    pmi,
    predict_links,
    recommend_similar,
)

__all__ = [
    "MiningError",
    "MiningParams",
    "DEFAULT_PARAMS",
    "TopicModel",
    "build_topic_model",
    "ctfidf_terms",
    "default_k",
    "doc_tokens",
    "fit_topics",
    "project_2d",
    "representatives",
    "topic_trend",
    "KeywordStats",
    "active_researchers",
    "biblio_coupling",
    "bridging_keywords",
    "co_citation",
    "communities",
    "keyword_stats",
    "pagerank",
    "pmi",
    "predict_links",
    "recommend_similar",
]
