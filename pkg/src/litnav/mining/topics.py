"""Topic modeling: spherical k-means, c-TF-IDF terms, PCA landscape.

The clustering pipeline is deterministic end to end. Initialization is a
farthest-first traversal from the lexicographically smallest uid, assignment
ties go to the lowest centroid index, and every ranked output breaks score
ties by ascending id. Outliers are labeled after convergence: any point whose
cosine to its centroid falls below tau_outlier gets topic -1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

import numpy as np

from . import DEFAULT_PARAMS, MiningError, MiningParams
from ..corpus import CorpusStore, MetadataRecord
from ..querylang import tokenize_text


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Result of a topic fit.

    assignment maps uid to a topic id in 0..k-1, or -1 for outliers.
    sizes[i] counts the non-outlier members of topic i, so
    sum(sizes) + outlier_count equals the number of embedded papers.
    terms is empty until filled in by build_topic_model.
    """

    k: int
    assignment: Mapping[str, int]
    centroids: tuple[np.ndarray, ...]
    sizes: tuple[int, ...]
    outlier_count: int
    projection: Mapping[str, tuple[float, float]]
    projection_degenerate: bool = False
    terms: Mapping[int, tuple[tuple[str, float], ...]] = field(
        default_factory=lambda: MappingProxyType({})
    )

    def members(self, topic_id: int) -> list[str]:
        """Uids assigned to topic_id (which may be -1), ascending."""
        return sorted(u for u, t in self.assignment.items() if t == topic_id)


def default_k(n: int) -> int:
    """Topic-count heuristic: max(2, round(sqrt(N/2)))."""
    return max(2, round(math.sqrt(n / 2)))


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec if norm == 0.0 else vec / norm


def fit_topics(
    embeddings: Sequence[tuple[str, np.ndarray]],
    params: MiningParams = DEFAULT_PARAMS,
) -> TopicModel:
    """Cluster embedded papers with deterministic spherical k-means.

    Requires at least 2 points. k defaults to the square-root heuristic and
    is clamped to the point count. Empty clusters are dropped after the fit
    and surviving topics are renumbered in stable order.
    """
    pairs = sorted(embeddings, key=lambda p: p[0])
    uids = [u for u, _ in pairs]
    if len(set(uids)) != len(uids):
        raise MiningError("duplicate uids in embeddings")
    n = len(pairs)
    if n < 2:
        raise MiningError(f"need at least 2 embedded papers, got {n}")
    mat = np.stack([_unit(np.asarray(v, dtype=np.float64)) for _, v in pairs])

    k = params.k if params.k is not None else default_k(n)
    k = min(k, n)

    # farthest-first seeding: start at the smallest uid, then repeatedly
    # take the point least similar to its closest chosen seed
    chosen = [0]
    while len(chosen) < k:
        best_idx = -1
        best_sim = math.inf
        for i in range(n):
            if i in chosen:
                continue
            sim = max(float(mat[i] @ mat[j]) for j in chosen)
            if sim < best_sim:
                best_sim = sim
                best_idx = i
        chosen.append(best_idx)
    centroids = mat[chosen].copy()

    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(params.max_iter):
        sims = mat @ centroids.T
        new_assign = np.argmax(sims, axis=1)  # argmax takes lowest index on ties
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = mat[assign == c]
            if len(members) == 0:
                continue
            total = members.sum(axis=0)
            norm = float(np.linalg.norm(total))
            if norm > 0.0:
                centroids[c] = total / norm

    # outliers are labeled post hoc and do not move the centroids
    final = []
    for i in range(n):
        c = int(assign[i])
        sim = float(mat[i] @ centroids[c])
        final.append(-1 if sim < params.tau_outlier else c)

    surviving = [c for c in range(k) if any(t == c for t in final)]
    renumber = {old: new for new, old in enumerate(surviving)}
    assignment = {
        uids[i]: (renumber[final[i]] if final[i] != -1 else -1) for i in range(n)
    }
    sizes = tuple(sum(1 for t in assignment.values() if t == new) for new in range(len(surviving)))
    outlier_count = sum(1 for t in assignment.values() if t == -1)

    if n >= 3:
        points, degenerate = project_2d(pairs, params)
    else:
        points = {u: (0.0, 0.0) for u in uids}
        degenerate = True

    return TopicModel(
        k=len(surviving),
        assignment=MappingProxyType(assignment),
        centroids=tuple(centroids[c] for c in surviving),
        sizes=sizes,
        outlier_count=outlier_count,
        projection=MappingProxyType(points),
        projection_degenerate=degenerate,
    )


def ctfidf_terms(
    docs_by_topic: Mapping[int, Sequence[str]], m: int = 10
) -> dict[int, list[tuple[str, float]]]:
    """Class-based TF-IDF over per-topic token multisets.

    weight(t, c) = tf(t, c) * ln(1 + A / f(t)), where tf is the count of t
    in class c, f(t) its total count across classes, and A the mean token
    count per class. Returns the top-m terms per class, score descending,
    ties lexicographic.
    """
    if not docs_by_topic:
        raise MiningError("no topics given")
    per_class = {c: Counter(tokens) for c, tokens in docs_by_topic.items()}
    totals: Counter[str] = Counter()
    for counts in per_class.values():
        totals.update(counts)
    if not totals:
        raise MiningError("empty vocabulary")
    avg_tokens = sum(totals.values()) / len(per_class)

    out: dict[int, list[tuple[str, float]]] = {}
    for c in sorted(per_class):
        counts = per_class[c]
        scored = [
            (term, tf * math.log(1.0 + avg_tokens / totals[term]))
            for term, tf in counts.items()
        ]
        scored.sort(key=lambda item: (-item[1], item[0]))
        out[c] = scored[:m]
    return out


def representatives(
    model: TopicModel,
    embeddings: Mapping[str, np.ndarray],
    topic_id: int,
    k: int = 5,
) -> list[tuple[str, float]]:
    """Topic members ranked by cosine to the topic centroid, descending."""
    if topic_id == -1:
        raise MiningError("outliers have no centroid to rank against")
    if not 0 <= topic_id < model.k:
        raise MiningError(f"unknown topic {topic_id}")
    centroid = model.centroids[topic_id]
    scored = [
        (uid, float(_unit(np.asarray(embeddings[uid], dtype=np.float64)) @ centroid))
        for uid in model.members(topic_id)
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def _power_iteration(
    cov: np.ndarray, tol: float, max_iter: int, ortho: Optional[np.ndarray] = None
) -> tuple[np.ndarray, float]:
    """Leading eigenvector of a PSD matrix, deterministic start vector."""
    d = cov.shape[0]
    vec = np.ones(d) / math.sqrt(d)
    basis = 0
    for _ in range(max_iter):
        if ortho is not None:
            vec = vec - (vec @ ortho) * ortho
        nxt = cov @ vec
        if ortho is not None:
            nxt = nxt - (nxt @ ortho) * ortho
        norm = float(np.linalg.norm(nxt))
        if norm < 1e-15:
            # start vector sits in the null space; restart from a basis axis
            if basis >= d:
                return np.zeros(d), 0.0
            vec = np.zeros(d)
            vec[basis] = 1.0
            basis += 1
            continue
        nxt = nxt / norm
        if float(np.linalg.norm(nxt - vec)) < tol:
            vec = nxt
            break
        vec = nxt
    eigenvalue = float(vec @ cov @ vec)
    # orient each axis so its largest-magnitude coordinate is positive
    peak = int(np.argmax(np.abs(vec)))
    if vec[peak] < 0:
        vec = -vec
    return vec, eigenvalue


def project_2d(
    embeddings: Sequence[tuple[str, np.ndarray]],
    params: MiningParams = DEFAULT_PARAMS,
) -> tuple[dict[str, tuple[float, float]], bool]:
    """PCA to two components via power iteration with deflation.

    Returns (points, degenerate). All-identical inputs map everything to
    (0, 0) with the degenerate flag set.
    """
    pairs = sorted(embeddings, key=lambda p: p[0])
    if len(pairs) < 3:
        raise MiningError(f"need at least 3 points, got {len(pairs)}")
    mat = np.stack([np.asarray(v, dtype=np.float64) for _, v in pairs])
    centered = mat - mat.mean(axis=0)
    cov = centered.T @ centered / len(pairs)
    if float(np.trace(cov)) < 1e-12:
        return {u: (0.0, 0.0) for u, _ in pairs}, True

    axis1, ev1 = _power_iteration(cov, params.tol, params.max_iter)
    deflated = cov - ev1 * np.outer(axis1, axis1)
    axis2, ev2 = _power_iteration(deflated, params.tol, params.max_iter, ortho=axis1)
    if ev2 < 1e-12:
        axis2 = np.zeros_like(axis1)

    xs = centered @ axis1
    ys = centered @ axis2
    points = {
        pairs[i][0]: (float(xs[i]), float(ys[i])) for i in range(len(pairs))
    }
    return points, False


def topic_trend(model: TopicModel, store: CorpusStore, topic_id: int) -> dict[int, int]:
    """Publication-year histogram of a topic's members, years ascending.

    Years with no papers are absent rather than zero-filled. The outlier
    class -1 is queryable and counts its own members.
    """
    if topic_id != -1 and not 0 <= topic_id < model.k:
        raise MiningError(f"unknown topic {topic_id}")
    years = Counter(
        store.records[uid].year for uid in model.members(topic_id) if uid in store.records
    )
    return {year: years[year] for year in sorted(years)}


def doc_tokens(record: MetadataRecord) -> list[str]:
    """Token multiset of a record for term scoring: title, abstract, keywords."""
    tokens = tokenize_text(record.title) + tokenize_text(record.abstract)
    for kw in record.keywords:
        tokens.extend(tokenize_text(kw))
    return tokens


def build_topic_model(
    store: CorpusStore,
    embeddings: Mapping[str, np.ndarray],
    params: MiningParams = DEFAULT_PARAMS,
) -> TopicModel:
    """Fit topics and fill in per-topic c-TF-IDF terms from the corpus."""
    model = fit_topics(sorted(embeddings.items()), params)
    docs = {
        topic: [tok for uid in model.members(topic) for tok in doc_tokens(store.records[uid])]
        for topic in range(model.k)
    }
    docs = {topic: tokens for topic, tokens in docs.items() if tokens}
    terms: dict[int, tuple[tuple[str, float], ...]] = {t: () for t in range(model.k)}
    if docs:
        for topic, ranked in ctfidf_terms(docs, params.m_terms).items():
            terms[topic] = tuple(ranked)
    return replace(model, terms=MappingProxyType(terms))
