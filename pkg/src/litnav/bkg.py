"""Heterogeneous bibliographic knowledge graph and its weighted projections.

Nodes cover papers, authors, venues, keywords, and institutions; edges are
typed (Cites, Authored, PublishedIn, HasKeyword, AffiliatedWith). Node ids
are canonical strings derived from record content, so the graph is a pure
function of the record set: permuting ingest order yields identical ids.

Citations pointing outside the corpus are dropped (and counted) so citation
analytics run on a closed graph.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

from .corpus import CorpusStore

_WS_RE = re.compile(r"\s+")


class NodeKind(str, Enum):
    PAPER = "paper"
    AUTHOR = "author"
    VENUE = "venue"
    KEYWORD = "keyword"
    INSTITUTION = "institution"


class EdgeKind(str, Enum):
    CITES = "cites"  # paper -> paper
    AUTHORED = "authored"  # author -> paper
    PUBLISHED_IN = "published_in"  # paper -> venue
    HAS_KEYWORD = "has_keyword"  # paper -> keyword
    AFFILIATED_WITH = "affiliated_with"  # author -> institution


_EDGE_ENDPOINTS = {
    EdgeKind.CITES: (NodeKind.PAPER, NodeKind.PAPER),
    EdgeKind.AUTHORED: (NodeKind.AUTHOR, NodeKind.PAPER),
    EdgeKind.PUBLISHED_IN: (NodeKind.PAPER, NodeKind.VENUE),
    EdgeKind.HAS_KEYWORD: (NodeKind.PAPER, NodeKind.KEYWORD),
    EdgeKind.AFFILIATED_WITH: (NodeKind.AUTHOR, NodeKind.INSTITUTION),
}


class BkgError(KeyError):
    pass


@dataclass(frozen=True)
class BkgNode:
    id: str
    kind: NodeKind
    label: str
    attrs: Mapping[str, Any]


@dataclass(frozen=True)
class BkgEdge:
    src: str
    dst: str
    kind: EdgeKind


def _canon(text: str) -> str:
    return _WS_RE.sub(" ", text).strip().lower()


def paper_id(uid: str) -> str:
    return f"paper:{uid}"


def author_id(canonical_name: str) -> str:
    return f"author:{canonical_name}"


def venue_id(venue: str) -> str:
    return f"venue:{_canon(venue)}"


def keyword_id(kw: str) -> str:
    return f"keyword:{kw}"


def institution_id(inst: str) -> str:
    return f"institution:{_canon(inst)}"


@dataclass(frozen=True)
class Bkg:
    """Immutable typed graph with per-kind adjacency indexes."""

    nodes: Mapping[str, BkgNode]
    edges: tuple[BkgEdge, ...]
    out_index: Mapping[EdgeKind, Mapping[str, tuple[str, ...]]]
    in_index: Mapping[EdgeKind, Mapping[str, tuple[str, ...]]]
    dropped_refs: int

    def node(self, node_id: str) -> BkgNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise BkgError(f"unknown node {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self.nodes

    def nodes_of_kind(self, kind: NodeKind) -> list[BkgNode]:
        return [n for n in self.nodes.values() if n.kind is kind]

    def paper_uids(self) -> list[str]:
        return sorted(n.attrs["uid"] for n in self.nodes.values() if n.kind is NodeKind.PAPER)


def neighbors(bkg: Bkg, node_id: str, kind: EdgeKind, direction: str = "out") -> list[str]:
    """Adjacent node ids along one edge kind, id-ascending.

    ``direction`` is "out" (edges leaving the node) or "in".
    """
    bkg.node(node_id)
    if direction == "out":
        return list(bkg.out_index.get(kind, {}).get(node_id, ()))
    if direction == "in":
        return list(bkg.in_index.get(kind, {}).get(node_id, ()))
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


def build_bkg(store: CorpusStore, embeddings: Optional[Mapping[str, Any]] = None) -> Bkg:
    """Construct the graph from an ingested store.

    One paper node per record; author, venue, keyword, and institution nodes
    are deduplicated by canonical string. Cites edges are kept only when the
    cited uid is in the store; dropped external references are counted.
    Optional ``embeddings`` (uid -> vector) are attached to paper nodes.
    """
    nodes: dict[str, BkgNode] = {}
    edge_set: set[tuple[str, str, EdgeKind]] = set()
    dropped = 0
    embeddings = embeddings or {}

    for uid in sorted(store.records):
        rec = store.records[uid]
        pid = paper_id(uid)
        nodes[pid] = BkgNode(
            id=pid,
            kind=NodeKind.PAPER,
            label=rec.title,
            attrs={
                "uid": uid,
                "title": rec.title,
                "abstract": rec.abstract,
                "year": rec.year,
                "venue": rec.venue,
                "embedding": embeddings.get(uid),
            },
        )

    for uid in sorted(store.records):
        rec = store.records[uid]
        pid = paper_id(uid)

        for author in rec.authors:
            aid = author_id(author.canonical_name)
            if aid not in nodes:
                nodes[aid] = BkgNode(aid, NodeKind.AUTHOR, author.canonical_name, {})
            edge_set.add((aid, pid, EdgeKind.AUTHORED))
            if author.institution:
                iid = institution_id(author.institution)
                if iid not in nodes:
                    nodes[iid] = BkgNode(
                        iid, NodeKind.INSTITUTION, _canon(author.institution), {}
                    )
                edge_set.add((aid, iid, EdgeKind.AFFILIATED_WITH))

        if rec.venue:
            vid = venue_id(rec.venue)
            if vid not in nodes:
                nodes[vid] = BkgNode(vid, NodeKind.VENUE, _canon(rec.venue), {})
            edge_set.add((pid, vid, EdgeKind.PUBLISHED_IN))

        for kw in rec.keywords:
            kid = keyword_id(kw)
            if kid not in nodes:
                nodes[kid] = BkgNode(kid, NodeKind.KEYWORD, kw, {})
            edge_set.add((pid, kid, EdgeKind.HAS_KEYWORD))

        for ref in rec.references:
            if ref in store.records:
                edge_set.add((paper_id(uid), paper_id(ref), EdgeKind.CITES))
            else:
                dropped += 1

    edges = tuple(
        BkgEdge(src, dst, kind)
        for src, dst, kind in sorted(edge_set, key=lambda e: (e[2].value, e[0], e[1]))
    )

    out_index: dict[EdgeKind, dict[str, list[str]]] = {k: {} for k in EdgeKind}
    in_index: dict[EdgeKind, dict[str, list[str]]] = {k: {} for k in EdgeKind}
    for edge in edges:
        out_index[edge.kind].setdefault(edge.src, []).append(edge.dst)
        in_index[edge.kind].setdefault(edge.dst, []).append(edge.src)
    out_final = {
        k: {n: tuple(sorted(v)) for n, v in idx.items()} for k, idx in out_index.items()
    }
    in_final = {k: {n: tuple(sorted(v)) for n, v in idx.items()} for k, idx in in_index.items()}

    return Bkg(
        nodes=nodes,
        edges=edges,
        out_index=out_final,
        in_index=in_final,
        dropped_refs=dropped,
    )


# ---------------------------------------------------------------------------
# Weighted undirected projections


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with positive integer edge weights."""

    nodes: tuple[str, ...]
    adj: Mapping[str, Mapping[str, int]]

    @staticmethod
    def from_pair_counts(
        nodes: Iterable[str], counts: Mapping[tuple[str, str], int]
    ) -> "WeightedGraph":
        adj: dict[str, dict[str, int]] = {n: {} for n in nodes}
        for (a, b), w in counts.items():
            if a == b:
                raise ValueError("self-loops are not allowed")
            if w < 1:
                raise ValueError("edge weights must be positive")
            adj.setdefault(a, {})[b] = w
            adj.setdefault(b, {})[a] = w
        return WeightedGraph(nodes=tuple(sorted(adj)), adj=adj)

    def weight(self, a: str, b: str) -> int:
        return self.adj.get(a, {}).get(b, 0)

    def neighbors_of(self, node: str) -> list[str]:
        return sorted(self.adj.get(node, {}))

    def degree(self, node: str) -> int:
        return len(self.adj.get(node, {}))

    def weighted_degree(self, node: str) -> int:
        return sum(self.adj.get(node, {}).values())

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def edges(self) -> list[tuple[str, str, int]]:
        out = []
        for a in self.nodes:
            for b, w in self.adj.get(a, {}).items():
                if a < b:
                    out.append((a, b, w))
        return sorted(out)


def coauthor_projection(bkg: Bkg) -> WeightedGraph:
    """Undirected co-authorship graph: weight = number of shared papers."""
    counts: dict[tuple[str, str], int] = {}
    authors = set()
    for node in bkg.nodes.values():
        if node.kind is not NodeKind.PAPER:
            continue
        pid = node.id
        names = sorted(
            {bkg.nodes[a].label for a in bkg.in_index[EdgeKind.AUTHORED].get(pid, ())}
        )
        authors.update(names)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                pair = (names[i], names[j])
                counts[pair] = counts.get(pair, 0) + 1
    return WeightedGraph.from_pair_counts(sorted(authors), counts)


def keyword_cooccurrence(bkg: Bkg) -> WeightedGraph:
    """Undirected keyword graph: weight = number of papers listing both."""
    counts: dict[tuple[str, str], int] = {}
    keywords = set()
    for node in bkg.nodes.values():
        if node.kind is not NodeKind.PAPER:
            continue
        kws = sorted(
            bkg.nodes[k].label for k in bkg.out_index[EdgeKind.HAS_KEYWORD].get(node.id, ())
        )
        keywords.update(kws)
        for i in range(len(kws)):
            for j in range(i + 1, len(kws)):
                pair = (kws[i], kws[j])
                counts[pair] = counts.get(pair, 0) + 1
    return WeightedGraph.from_pair_counts(sorted(keywords), counts)


def citation_subgraph(bkg: Bkg) -> tuple[list[str], dict[str, list[str]]]:
    """Directed Cites subgraph over paper uids: (sorted uids, uid -> cited)."""
    uids = bkg.paper_uids()
    out: dict[str, list[str]] = {}
    for uid in uids:
        cited = bkg.out_index[EdgeKind.CITES].get(paper_id(uid), ())
        out[uid] = [bkg.nodes[c].attrs["uid"] for c in cited]
    return uids, out


# ---------------------------------------------------------------------------
# Serialization (graph dump consumed by the web UI and golden-file tests)


def graph_to_json(bkg: Bkg) -> dict:
    return {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "label": n.label}
            for n in sorted(bkg.nodes.values(), key=lambda n: (n.kind.value, n.id))
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "kind": e.kind.value} for e in bkg.edges
        ],
    }


def dump_graph(bkg: Bkg, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(bkg), fh, ensure_ascii=False, indent=1)
