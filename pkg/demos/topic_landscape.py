"""Topic modeling and the 2D landscape, rendered as ASCII.

Embeds the bundled corpus with the deterministic hashing embedder, fits
spherical k-means topics, labels them with c-TF-IDF terms, and draws the
PCA projection as a terminal scatter plot.
"""

from pathlib import Path

from litnav.corpus import load_corpus
from litnav.embed import HashingEmbedder
from litnav.mining import build_topic_model, recommend_similar, topic_trend

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ai4health_50.jsonl"


def ascii_scatter(points: dict[str, tuple[float, float]], labels: dict[str, int],
                  width: int = 68, height: int = 20) -> str:
    xs = [p[0] for p in points.values()]
    ys = [p[1] for p in points.values()]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    grid = [[" "] * width for _ in range(height)]
    for uid, (x, y) in sorted(points.items()):
        col = int((x - x0) / (x1 - x0 or 1.0) * (width - 1))
        row = int((y - y0) / (y1 - y0 or 1.0) * (height - 1))
        mark = "." if labels[uid] == -1 else str(labels[uid])
        grid[height - 1 - row][col] = mark
    return "\n".join("".join(row) for row in grid)


def main() -> None:
    store = load_corpus(FIXTURE)
    embedder = HashingEmbedder()
    embeddings = {
        uid: embedder.embed(f"{rec.title} {rec.abstract}")
        for uid, rec in sorted(store.records.items())
    }
    model = build_topic_model(store, embeddings)
    print(f"{len(embeddings)} papers, k={model.k} topics, "
          f"{model.outlier_count} outliers")

    print()
    for topic in range(model.k):
        terms = ", ".join(term for term, _ in model.terms[topic][:6])
        print(f"topic {topic} ({model.sizes[topic]} papers): {terms}")
        trend = topic_trend(model, store, topic)
        line = "  ".join(f"{year}:{count}" for year, count in trend.items())
        print(f"  trend {line}")

    print()
    print("landscape (digit = topic id, dot = outlier)")
    print(ascii_scatter(model.projection, model.assignment))

    print()
    anchor = sorted(embeddings)[0]
    print(f"papers most similar to {anchor} ({store.records[anchor].title[:50]}):")
    for uid, score in recommend_similar(store, embeddings, anchor, k=3):
        print(f"  {score:.3f}  {uid}  {store.records[uid].title[:60]}")


if __name__ == "__main__":
    main()
