"""Tour of the fielded boolean query language.

Parses a few queries into ASTs, shows canonical rendering, demonstrates
error reporting with byte offsets, and runs searches against the bundled
50-record corpus.
"""

from pathlib import Path

from litnav.corpus import load_corpus
from litnav.querylang import ParseError, apply_ts_default, parse_query, render_query, search

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ai4health_50.jsonl"


def show(text: str) -> None:
    ast = apply_ts_default(parse_query(text))
    print(f"  input:     {text}")
    print(f"  canonical: {render_query(ast)}")


def main() -> None:
    print("= Parsing and canonical form =")
    # operators bind NOT > AND > OR; redundant parens disappear on render
    show('TS=((dementia)) AND (TI=(speech) OR AB=(voice))')
    # bare terms default to the topic scope
    show("dementia AND screening")
    # binary NOT is sugar for AND NOT
    show("TS=(imaging) NOT TS=(ultrasound)")
    # phrases keep word order; wildcards expand at the token tail
    show('TS=("mental health" OR wearable*) AND PY=(2019-2024)')

    print()
    print("= Errors point at the offending byte =")
    for bad in ["TS=(", "PY=(2024-2019)", "TS=(a OR )", "ZZ=(x)"]:
        try:
            parse_query(bad)
        except ParseError as exc:
            print(f"  {bad!r}: {exc}")

    print()
    print("= Searching the bundled corpus =")
    store = load_corpus(FIXTURE)
    for text in [
        'TS=("mental health")',
        "TS=(llm* OR chatbot*) AND TS=(clinical)",
        "AU=(chen) AND PY=(2021-2025)",
    ]:
        ast = apply_ts_default(parse_query(text))
        hits = search(ast, store)
        print(f"  {text}")
        print(f"    {len(hits)} hits; newest first: {hits[:5]}")
        for uid in hits[:2]:
            rec = store.records[uid]
            print(f"    {uid} ({rec.year}) {rec.title}")


if __name__ == "__main__":
    main()
