"""Graph analytics over the knowledge graph: ranking, similarity, structure.

Node sweep orders and tie-breaks are fixed (id or name ascending), so each
function is a deterministic map from graph to result. PageRank runs on the
directed Cites subgraph; community detection and link prediction run on the
undirected weighted projections.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import DEFAULT_PARAMS, MiningError, MiningParams
from ..bkg import Bkg, EdgeKind, NodeKind, WeightedGraph, coauthor_projection, paper_id
from ..corpus import CorpusStore
from ..embed import cosine


def pagerank(
    nodes: Sequence[str],
    out_edges: Mapping[str, Sequence[str]],
    params: MiningParams = DEFAULT_PARAMS,
) -> dict[str, float]:
    """PageRank with uniform teleport and uniform dangling redistribution.

    Iterates until the L1 change drops below tol or max_iter; scores sum
    to 1 within numerical error.
    """
    order = sorted(nodes)
    if not order:
        raise MiningError("pagerank on an empty graph")
    if len(set(order)) != len(order):
        raise MiningError("duplicate node ids")
    index = {node: i for i, node in enumerate(order)}
    out_lists: list[list[int]] = []
    for node in order:
        targets = set()
        for t in out_edges.get(node, ()):
            if t not in index:
                raise MiningError(f"edge target {t!r} not in node set")
            targets.add(index[t])
        out_lists.append(sorted(targets))

    n = len(order)
    d = params.damping
    base = (1.0 - d) / n
    scores = np.full(n, 1.0 / n)
    for _ in range(params.max_iter):
        nxt = np.full(n, base)
        dangling = 0.0
        for i, targets in enumerate(out_lists):
            if targets:
                share = d * scores[i] / len(targets)
                for j in targets:
                    nxt[j] += share
            else:
                dangling += scores[i]
        nxt += d * dangling / n
        delta = float(np.abs(nxt - scores).sum())
        scores = nxt
        if delta < params.tol:
            break
    return {order[i]: float(scores[i]) for i in range(n)}


def _cites(bkg: Bkg, uid: str, direction: str) -> set[str]:
    pid = paper_id(uid)
    if not bkg.has_node(pid):
        raise MiningError(f"unknown paper {uid!r}")
    idx = bkg.out_index if direction == "out" else bkg.in_index
    return set(idx[EdgeKind.CITES].get(pid, ()))


def biblio_coupling(bkg: Bkg, a: str, b: str) -> int:
    """Number of papers cited by both a and b."""
    return len(_cites(bkg, a, "out") & _cites(bkg, b, "out"))


def co_citation(bkg: Bkg, a: str, b: str) -> int:
    """Number of papers citing both a and b."""
    return len(_cites(bkg, a, "in") & _cites(bkg, b, "in"))


def recommend_similar(
    bkg: Bkg,
    embeddings: Mapping[str, np.ndarray],
    uid: str,
    k: int = 5,
) -> list[tuple[str, float]]:
    """Blend of embedding similarity and bibliographic coupling.

    score(x) = 0.5 * cosine(e_uid, e_x)
             + 0.5 * coupling(uid, x) / max(1, max coupling over candidates).
    The query paper itself is excluded.
    """
    if not bkg.has_node(paper_id(uid)):
        raise MiningError(f"unknown paper {uid!r}")
    if uid not in embeddings:
        raise MiningError(f"paper {uid!r} has no embedding")
    candidates = sorted(u for u in bkg.paper_uids() if u != uid and u in embeddings)
    if not candidates:
        return []
    couplings = {c: biblio_coupling(bkg, uid, c) for c in candidates}
    denom = max(1, max(couplings.values()))
    query = embeddings[uid]
    scored = [
        (c, 0.5 * cosine(embeddings[c], query) + 0.5 * couplings[c] / denom)
        for c in candidates
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def communities(
    graph: WeightedGraph, params: MiningParams = DEFAULT_PARAMS
) -> dict[str, int]:
    """Deterministic asynchronous label propagation.

    Labels start as node ids; nodes are swept id-ascending, each adopting the
    weighted-plurality label among its neighbors (ties to the smallest label)
    with updates visible within the sweep. Stops at a fixpoint sweep or
    max_iter. Communities are renumbered 0..C-1 by smallest member id.
    """
    if not graph.nodes:
        raise MiningError("empty graph")
    labels = {n: n for n in graph.nodes}
    for _ in range(params.max_iter):
        changed = False
        for node in graph.nodes:
            nbrs = graph.adj.get(node, {})
            if not nbrs:
                continue
            weight_by_label: dict[str, int] = {}
            for other, w in nbrs.items():
                lab = labels[other]
                weight_by_label[lab] = weight_by_label.get(lab, 0) + w
            best = min(weight_by_label.items(), key=lambda it: (-it[1], it[0]))[0]
            if best != labels[node]:
                labels[node] = best
                changed = True
        if not changed:
            break

    groups: dict[str, list[str]] = {}
    for node in graph.nodes:
        groups.setdefault(labels[node], []).append(node)
    ordered = sorted(groups.values(), key=lambda members: members[0])
    out: dict[str, int] = {}
    for cid, members in enumerate(ordered):
        for member in members:
            out[member] = cid
    return out


def active_researchers(bkg: Bkg, k: int = 10) -> list[tuple[str, float]]:
    """Authors ranked by paper count plus weighted co-authorship degree."""
    coauth = coauthor_projection(bkg)
    scored = []
    for node in bkg.nodes_of_kind(NodeKind.AUTHOR):
        name = node.label
        paper_count = len(bkg.out_index[EdgeKind.AUTHORED].get(node.id, ()))
        scored.append((name, float(paper_count + coauth.weighted_degree(name))))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def bridging_keywords(
    graph: WeightedGraph, k: int = 10, params: MiningParams = DEFAULT_PARAMS
) -> list[tuple[str, float]]:
    """Keywords whose neighborhoods span the most foreign communities.

    Score = number of distinct neighbor communities other than the keyword's
    own. Ties break by weighted degree descending, then name ascending.
    """
    if not graph.nodes:
        raise MiningError("empty keyword graph")
    comm = communities(graph, params)
    scored = []
    for kw in graph.nodes:
        foreign = {comm[nb] for nb in graph.neighbors_of(kw)} - {comm[kw]}
        scored.append((kw, float(len(foreign))))
    scored.sort(key=lambda item: (-item[1], -graph.weighted_degree(item[0]), item[0]))
    return scored[:k]


@dataclass(frozen=True)
class KeywordStats:
    """Per-keyword paper counts plus the corpus size, for PMI."""

    n_papers: int
    counts: Mapping[str, int]


def keyword_stats(store: CorpusStore) -> KeywordStats:
    counts: Counter[str] = Counter()
    for rec in store.records.values():
        counts.update(set(rec.keywords))
    return KeywordStats(
        n_papers=len(store.records),
        counts=MappingProxyType({kw: counts[kw] for kw in sorted(counts)}),
    )


def pmi(graph: WeightedGraph, stats: KeywordStats, a: str, b: str) -> float:
    """Pointwise mutual information of two keywords from paper counts.

    PMI = ln(cooccur * N / (count(a) * count(b))). A pair that never
    co-occurs returns -inf as the "never co-occur" sentinel.
    """
    for kw in (a, b):
        if stats.counts.get(kw, 0) < 1:
            raise MiningError(f"unknown keyword {kw!r}")
    together = graph.weight(a, b)
    if together == 0:
        return float("-inf")
    return math.log(together * stats.n_papers / (stats.counts[a] * stats.counts[b]))


def predict_links(
    graph: WeightedGraph, k: int = 10
) -> list[tuple[tuple[str, str], float]]:
    """Adamic-Adar scores for non-adjacent pairs with a common neighbor.

    AA(a, b) = sum over common neighbors z of 1 / ln(deg(z)), where deg
    counts distinct neighbors. Pairs are returned (a, b) with a < b, ranked
    score descending, ties pair-ascending.
    """
    if graph.edge_count() == 0:
        raise MiningError("link prediction needs at least one edge")
    scores: dict[tuple[str, str], float] = {}
    for z in graph.nodes:
        nbrs = graph.neighbors_of(z)
        if len(nbrs) < 2:
            continue
        inv = 1.0 / math.log(len(nbrs))
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                if graph.weight(a, b) > 0:
                    continue
                pair = (a, b)
                scores[pair] = scores.get(pair, 0.0) + inv
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
