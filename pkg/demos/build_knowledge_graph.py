"""From raw JSONL to a bibliographic knowledge graph and its analytics.

Ingests the bundled corpus, builds the typed graph over papers, authors,
venues, keywords, and institutions, then runs the graph miners: PageRank,
coauthor communities, link prediction, and keyword statistics.
"""

from pathlib import Path

from litnav.bkg import build_bkg, citation_subgraph, coauthor_projection, keyword_cooccurrence
from litnav.corpus import load_corpus
from litnav.mining import (
    active_researchers,
    bridging_keywords,
    communities,
    keyword_stats,
    pagerank,
    pmi,
    predict_links,
)

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ai4health_50.jsonl"


def main() -> None:
    store = load_corpus(FIXTURE)
    stats = store.stats
    print(f"ingested {stats.accepted} records "
          f"({stats.rejected} rejected, {stats.deduplicated} duplicates)")

    bkg = build_bkg(store)
    by_kind: dict[str, int] = {}
    for node in bkg.nodes.values():
        by_kind[node.kind.value] = by_kind.get(node.kind.value, 0) + 1
    print(f"graph: {len(bkg.nodes)} nodes {by_kind}, "
          f"{len(bkg.edges)} edges, {bkg.dropped_refs} external references dropped")

    print()
    print("= PageRank over the citation subgraph =")
    nodes, out_edges = citation_subgraph(bkg)
    ranks = pagerank(nodes, out_edges)
    top = sorted(ranks.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    for uid, score in top:
        print(f"  {score:.4f}  {uid}  {store.records[uid].title[:60]}")

    print()
    print("= Coauthor communities =")
    coauthors = coauthor_projection(bkg)
    assignment = communities(coauthors)
    groups: dict[int, list[str]] = {}
    for name, comm in assignment.items():
        groups.setdefault(comm, []).append(name)
    sized = sorted(groups.values(), key=len, reverse=True)
    print(f"  {len(groups)} communities over {len(assignment)} authors")
    for members in sized[:3]:
        print(f"  size {len(members)}: {sorted(members)[:6]}")

    print()
    print("= Who is most active =")
    for name, score in active_researchers(bkg, k=5):
        print(f"  {score:5.1f}  {name}")

    print()
    print("= Keyword structure =")
    kstats = keyword_stats(store)
    top = sorted(kstats.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    print(f"  {len(kstats.counts)} distinct keywords across {kstats.n_papers} papers, "
          f"top: {[kw for kw, _ in top]}")
    cooccur = keyword_cooccurrence(bkg)
    for kw, score in bridging_keywords(cooccur, k=3):
        print(f"  bridge {score:.2f}  {kw}")
    a, b = "large language models", "mental health"
    print(f"  pmi({a!r}, {b!r}) = {pmi(cooccur, kstats, a, b):.3f}")

    print()
    print("= Predicted coauthor links (Adamic-Adar) =")
    for (u, v), score in predict_links(coauthors, k=5):
        print(f"  {score:.3f}  {u} -- {v}")


if __name__ == "__main__":
    main()
