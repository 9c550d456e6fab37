"""Tool registry: the analysis operations the agent may select and run.

Each tool declares a JSON schema for its params, a handler over the session
artifacts, and a slot builder that feeds its response template. Results are
wrapped in envelopes carrying the params actually used and provenance counts
so every templated sentence can cite where its numbers came from.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Optional

import jsonschema
import numpy as np

from ..bkg import (
    Bkg,
    NodeKind,
    citation_subgraph,
    coauthor_projection,
    keyword_cooccurrence,
)
from ..corpus import CorpusStore
from ..embed import EmbedError, knn
from ..mining import (
    MiningError,
    MiningParams,
    DEFAULT_PARAMS,
    build_topic_model,
    communities,
    keyword_stats,
    pagerank,
    pmi,
    predict_links,
    recommend_similar,
    representatives,
    topic_trend,
    active_researchers,
    bridging_keywords,
)
from ..mining.topics import TopicModel
from .templates import render


class ToolError(Exception):
    """Precondition or execution failure, surfaced as a user-visible line."""


@dataclass(frozen=True)
class ToolCall:
    tool: str
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass
class ToolContext:
    """Session artifacts the handlers draw on."""

    store: Optional[CorpusStore] = None
    bkg: Optional[Bkg] = None
    embeddings: Mapping[str, np.ndarray] = field(default_factory=dict)
    model: Optional[TopicModel] = None
    params: MiningParams = DEFAULT_PARAMS
    provider: Any = None
    embedder: Any = None
    rag_k: int = 8


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    schema: dict
    handler: Callable[[ToolContext, dict], tuple[dict, dict, dict]]
    slots: Callable[[dict], dict]


def _need(ctx: ToolContext, what: str):
    value = getattr(ctx, what)
    if what == "embeddings" and not value:
        raise ToolError("no embedded papers are available yet")
    if value is None:
        messages = {
            "store": "no retrieved corpus is bound to this session yet",
            "bkg": "the knowledge graph has not been built yet",
            "model": "no topic model is available (need at least 2 embedded papers)",
        }
        raise ToolError(messages.get(what, f"missing {what}"))
    return value


def _title(ctx: ToolContext, uid: str) -> str:
    rec = ctx.store.records.get(uid) if ctx.store else None
    return rec.title if rec else uid


def _prov_str(prov: Mapping[str, Any]) -> str:
    return ", ".join(f"{k}={prov[k]}" for k in sorted(prov))


# --- handlers ---------------------------------------------------------------


def _h_fit_topics(ctx: ToolContext, params: dict):
    model = _need(ctx, "model")
    if "k" in params:
        store = _need(ctx, "store")
        model = build_topic_model(store, ctx.embeddings, replace(ctx.params, k=params["k"]))
    resolved = {"k": model.k}
    result = {
        "n_embedded": len(ctx.embeddings),
        "k": model.k,
        "sizes": list(model.sizes),
        "outlier_count": model.outlier_count,
        "terms": {t: [[term, score] for term, score in model.terms.get(t, ())] for t in range(model.k)},
    }
    prov = {
        "n_embedded": len(ctx.embeddings),
        "tau_outlier": ctx.params.tau_outlier,
        "k": model.k,
    }
    return resolved, result, prov


def _s_fit_topics(env: dict) -> dict:
    result = env["result"]
    lines = []
    for t in range(result["k"]):
        terms = ", ".join(term for term, _ in result["terms"][t][:5]) or "(no terms)"
        lines.append(f"- Topic {t} ({result['sizes'][t]} papers): {terms}")
    return {
        "n": result["n_embedded"],
        "k": result["k"],
        "outliers": result["outlier_count"],
        "tau": env["provenance"]["tau_outlier"],
        "topics_block": "\n".join(lines),
        "provenance": _prov_str(env["provenance"]),
    }


def _h_topic_trend(ctx: ToolContext, params: dict):
    model = _need(ctx, "model")
    store = _need(ctx, "store")
    tid = params["topic_id"]
    trend = topic_trend(model, store, tid)
    resolved = {"topic_id": tid}
    result = {"topic_id": tid, "trend": trend, "total": sum(trend.values())}
    prov = {"topic_id": tid, "n_years": len(trend), "total": result["total"]}
    return resolved, result, prov


def _s_topic_trend(env: dict) -> dict:
    result = env["result"]
    trend = result["trend"]
    line = ", ".join(f"{year}: {trend[year]}" for year in sorted(trend)) or "no member papers"
    return {
        "topic_id": result["topic_id"],
        "total": result["total"],
        "trend_line": line,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_representatives(ctx: ToolContext, params: dict):
    model = _need(ctx, "model")
    _need(ctx, "embeddings")
    tid = params["topic_id"]
    k = params.get("k", 5)
    ranked = representatives(model, ctx.embeddings, tid, k)
    resolved = {"topic_id": tid, "k": k}
    result = {
        "topic_id": tid,
        "items": [{"uid": uid, "title": _title(ctx, uid), "score": score} for uid, score in ranked],
    }
    prov = {"topic_id": tid, "k": k, "returned": len(ranked)}
    return resolved, result, prov


def _s_representatives(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(f"- {it['uid']} ({it['score']:.4f}) {it['title']}" for it in items) or "- none"
    return {
        "topic_id": env["result"]["topic_id"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_recommend_similar(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    _need(ctx, "embeddings")
    uid = params["uid"]
    k = params.get("k", 5)
    ranked = recommend_similar(bkg, ctx.embeddings, uid, k)
    resolved = {"uid": uid, "k": k}
    result = {
        "uid": uid,
        "items": [{"uid": u, "title": _title(ctx, u), "score": s} for u, s in ranked],
    }
    prov = {"uid": uid, "k": k, "returned": len(ranked)}
    return resolved, result, prov


def _s_recommend_similar(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(f"- {it['uid']} ({it['score']:.4f}) {it['title']}" for it in items) or "- none"
    return {
        "uid": env["result"]["uid"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_pagerank(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    k = params.get("k", 10)
    nodes, out_edges = citation_subgraph(bkg)
    scores = pagerank(nodes, out_edges, ctx.params)
    ranked = sorted(scores.items(), key=lambda it: (-it[1], it[0]))[:k]
    resolved = {"k": k}
    result = {
        "items": [{"uid": u, "title": _title(ctx, u), "score": s} for u, s in ranked],
        "n_nodes": len(nodes),
    }
    prov = {
        "n_nodes": len(nodes),
        "damping": ctx.params.damping,
        "tol": ctx.params.tol,
        "k": k,
    }
    return resolved, result, prov


def _s_pagerank(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(f"- {it['uid']} ({it['score']:.6f}) {it['title']}" for it in items) or "- none"
    return {
        "k": env["params"]["k"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_active_researchers(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    k = params.get("k", 10)
    ranked = active_researchers(bkg, k)
    resolved = {"k": k}
    result = {"items": [{"name": name, "score": score} for name, score in ranked]}
    prov = {"n_authors": len(bkg.nodes_of_kind(NodeKind.AUTHOR)), "k": k}
    return resolved, result, prov


def _s_active_researchers(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(f"- {it['name']} (score {it['score']:g})" for it in items) or "- none"
    return {
        "k": env["params"]["k"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_communities(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    graph = coauthor_projection(bkg)
    if not graph.nodes:
        raise ToolError("no authors in the retrieved corpus")
    assignment = communities(graph, ctx.params)
    count = max(assignment.values()) + 1
    members: dict[int, list[str]] = {}
    for name in graph.nodes:
        members.setdefault(assignment[name], []).append(name)
    groups = sorted(members.items(), key=lambda it: (-len(it[1]), it[0]))[:5]
    resolved: dict = {}
    result = {
        "count": count,
        "n_authors": len(graph.nodes),
        "groups": [
            {"community": cid, "size": len(ms), "members": ms[:3]} for cid, ms in groups
        ],
    }
    prov = {"n_authors": len(graph.nodes), "communities": count}
    return resolved, result, prov


def _s_communities(env: dict) -> dict:
    result = env["result"]
    block = "\n".join(
        f"- Group {g['community']}: {g['size']} authors ({', '.join(g['members'])})"
        for g in result["groups"]
    ) or "- none"
    return {
        "count": result["count"],
        "n_authors": result["n_authors"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_bridging_keywords(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    k = params.get("k", 10)
    graph = keyword_cooccurrence(bkg)
    if not graph.nodes:
        raise ToolError("no keywords in the retrieved corpus")
    ranked = bridging_keywords(graph, k, ctx.params)
    resolved = {"k": k}
    result = {"items": [{"keyword": kw, "score": score} for kw, score in ranked]}
    prov = {"n_keywords": len(graph.nodes), "k": k}
    return resolved, result, prov


def _s_bridging_keywords(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(
        f"- {it['keyword']} (bridges {int(it['score'])} communities)" for it in items
    ) or "- none"
    return {
        "k": env["params"]["k"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_keyword_pmi(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    store = _need(ctx, "store")
    a, b = params["a"], params["b"]
    graph = keyword_cooccurrence(bkg)
    stats = keyword_stats(store)
    value = pmi(graph, stats, a, b)
    never = value == float("-inf")
    resolved = {"a": a, "b": b}
    result = {
        "a": a,
        "b": b,
        "pmi": None if never else value,
        "never_cooccur": never,
        "count_a": stats.counts[a],
        "count_b": stats.counts[b],
        "n_papers": stats.n_papers,
    }
    prov = {
        "count_a": stats.counts[a],
        "count_b": stats.counts[b],
        "n_papers": stats.n_papers,
    }
    return resolved, result, prov


def _s_keyword_pmi(env: dict) -> dict:
    result = env["result"]
    if result["never_cooccur"]:
        line = f"the keywords never co-occur in the {result['n_papers']} retrieved papers"
    else:
        line = f"PMI = {result['pmi']:.4f} over {result['n_papers']} papers"
    return {
        "a": result["a"],
        "b": result["b"],
        "pmi_line": line,
        "provenance": _prov_str(env["provenance"]),
    }


def _h_predict_links(ctx: ToolContext, params: dict):
    bkg = _need(ctx, "bkg")
    k = params.get("k", 10)
    graph = keyword_cooccurrence(bkg)
    if graph.edge_count() == 0:
        raise ToolError("the keyword graph has no edges")
    ranked = predict_links(graph, k)
    resolved = {"k": k}
    result = {"items": [{"a": a, "b": b, "score": s} for (a, b), s in ranked]}
    prov = {"n_keywords": len(graph.nodes), "n_edges": graph.edge_count(), "k": k}
    return resolved, result, prov


def _s_predict_links(env: dict) -> dict:
    items = env["result"]["items"]
    block = "\n".join(f"- {it['a']} + {it['b']} (score {it['score']:.4f})" for it in items) or "- none"
    return {
        "k": env["params"]["k"],
        "items_block": block,
        "provenance": _prov_str(env["provenance"]),
    }


_BRACKET = re.compile(r" ?\[([^\[\]]+)\]")


def guard_citations(text: str, allowed: set[str]) -> tuple[str, list[str], list[str]]:
    """Strip bracketed citations that are not in the retrieved set.

    Returns (cleaned text, cited uids kept in order, stripped tokens).
    """
    kept: list[str] = []
    stripped: list[str] = []

    def _sub(match: re.Match) -> str:
        token = match.group(1).strip()
        if token in allowed:
            if token not in kept:
                kept.append(token)
            return match.group(0)
        stripped.append(token)
        return ""

    cleaned = _BRACKET.sub(_sub, text)
    if stripped:
        cleaned = re.sub(r"\s{2,}", " ", cleaned)
        cleaned = re.sub(r"\s+([.,;:!?])", r"\1", cleaned).strip()
    return cleaned, kept, stripped


def _h_rag_answer(ctx: ToolContext, params: dict):
    store = _need(ctx, "store")
    _need(ctx, "embeddings")
    question = params["question"]
    k = ctx.rag_k
    try:
        qvec = ctx.embedder.embed_batch([question])[0]
    except EmbedError as exc:
        raise ToolError(str(exc)) from None
    hits = knn(sorted(ctx.embeddings.items()), qvec, k)
    retrieved = [uid for uid, _ in hits]
    contexts = "\n".join(
        f"[{uid}] {store.records[uid].title}. {store.records[uid].abstract}"
        for uid in retrieved
    )
    prompt = render("prompts", "rag_answer", {"contexts": contexts, "question": question})
    try:
        raw = ctx.provider.complete([{"role": "user", "content": prompt}], None)
    except Exception as exc:  # noqa: BLE001 - external boundary
        raise ToolError(f"provider failed: {exc}") from None
    answer, cited, stripped = guard_citations(raw, set(retrieved))
    resolved = {"question": question, "k": len(retrieved)}
    result = {
        "answer": answer,
        "retrieved": retrieved,
        "cited": cited,
        "stripped": stripped,
        "k": len(retrieved),
    }
    prov = {"k_retrieved": len(retrieved), "cited": len(cited), "stripped": len(stripped)}
    return resolved, result, prov


def _s_rag_answer(env: dict) -> dict:
    result = env["result"]
    if result["stripped"]:
        note = f"; removed {len(result['stripped'])} unsupported citation(s)"
    else:
        note = "; all citations are supported"
    return {
        "answer": result["answer"],
        "k": result["k"],
        "stripped_note": note,
        "provenance": _prov_str(env["provenance"]),
    }


def _obj_schema(props: dict, required: Optional[list[str]] = None) -> dict:
    schema: dict = {"type": "object", "properties": props, "additionalProperties": False}
    if required:
        schema["required"] = required
    return schema


_K = {"k": {"type": "integer", "minimum": 1}}

REGISTRY: dict[str, ToolSpec] = {
    spec.name: spec
    for spec in [
        ToolSpec(
            "fit_topics",
            "Cluster the retrieved papers into topics with sizes, outliers, and labeling terms",
            _obj_schema(dict(_K)),
            _h_fit_topics,
            _s_fit_topics,
        ),
        ToolSpec(
            "topic_trend",
            "Publication-year counts for one topic (topic_id; -1 for outliers)",
            _obj_schema({"topic_id": {"type": "integer", "minimum": -1}}, ["topic_id"]),
            _h_topic_trend,
            _s_topic_trend,
        ),
        ToolSpec(
            "representatives",
            "Papers closest to a topic centroid",
            _obj_schema({"topic_id": {"type": "integer", "minimum": 0}, **_K}, ["topic_id"]),
            _h_representatives,
            _s_representatives,
        ),
        ToolSpec(
            "recommend_similar",
            "Papers similar to a given uid by embedding and shared references",
            _obj_schema({"uid": {"type": "string", "minLength": 1}, **_K}, ["uid"]),
            _h_recommend_similar,
            _s_recommend_similar,
        ),
        ToolSpec(
            "pagerank",
            "Most influential papers by citation PageRank",
            _obj_schema(dict(_K)),
            _h_pagerank,
            _s_pagerank,
        ),
        ToolSpec(
            "active_researchers",
            "Authors ranked by output and co-authorship activity",
            _obj_schema(dict(_K)),
            _h_active_researchers,
            _s_active_researchers,
        ),
        ToolSpec(
            "communities",
            "Co-authorship groups via deterministic label propagation",
            _obj_schema({}),
            _h_communities,
            _s_communities,
        ),
        ToolSpec(
            "bridging_keywords",
            "Keywords connecting distinct research communities",
            _obj_schema(dict(_K)),
            _h_bridging_keywords,
            _s_bridging_keywords,
        ),
        ToolSpec(
            "keyword_pmi",
            "Association strength (PMI) between two keywords",
            _obj_schema(
                {"a": {"type": "string", "minLength": 1}, "b": {"type": "string", "minLength": 1}},
                ["a", "b"],
            ),
            _h_keyword_pmi,
            _s_keyword_pmi,
        ),
        ToolSpec(
            "predict_links",
            "Keyword pairs likely to co-occur next (Adamic-Adar)",
            _obj_schema(dict(_K)),
            _h_predict_links,
            _s_predict_links,
        ),
        ToolSpec(
            "rag_answer",
            "Answer a free-form question from retrieved abstracts with citations",
            _obj_schema({"question": {"type": "string", "minLength": 1}}, ["question"]),
            _h_rag_answer,
            _s_rag_answer,
        ),
    ]
}

TOOLCALL_ARRAY_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {"tool": {"type": "string"}, "params": {"type": "object"}},
        "required": ["tool"],
        "additionalProperties": False,
    },
}


def registry_prompt() -> str:
    """Registry rendering shown to the provider during tool selection."""
    lines = []
    for spec in REGISTRY.values():
        schema = json.dumps(spec.schema, sort_keys=True)
        lines.append(f"- {spec.name}: {spec.description}. Params schema: {schema}")
    return "\n".join(lines)


def validate_call(tool: str, params: Mapping[str, Any]) -> Optional[str]:
    """Return a rejection reason, or None when the call is valid."""
    spec = REGISTRY.get(tool)
    if spec is None:
        return f"unknown tool {tool!r}"
    try:
        jsonschema.validate(instance=dict(params), schema=spec.schema)
    except jsonschema.ValidationError as exc:
        return f"invalid params for {tool}: {exc.message}"
    return None


def run_tool(call: ToolCall, ctx: ToolContext) -> dict:
    """Execute a validated call, returning its result envelope.

    Precondition violations raise ToolError with a message fit to show the
    user; they never crash the session.
    """
    reason = validate_call(call.tool, call.params)
    if reason:
        raise ToolError(reason)
    spec = REGISTRY[call.tool]
    try:
        resolved, result, prov = spec.handler(ctx, dict(call.params))
    except (MiningError, EmbedError) as exc:
        raise ToolError(str(exc)) from None
    return {"tool": call.tool, "params": resolved, "result": result, "provenance": prov}


def render_envelope(envelope: dict) -> str:
    """Compose one envelope into its templated response section."""
    spec = REGISTRY[envelope["tool"]]
    return render("templates", spec.name, spec.slots(envelope))


_TOPIC_ID = re.compile(r"topic\s*#?\s*(\d+)")
_UID_TOKEN = re.compile(r"\b([A-Za-z]+\d{2,})\b")


def route_text(text: str) -> list[dict]:
    """Fallback keyword router: always returns exactly one plausible call."""
    low = text.lower()
    match = _TOPIC_ID.search(low)
    topic_id = int(match.group(1)) if match else 0
    if "trend" in low:
        return [{"tool": "topic_trend", "params": {"topic_id": topic_id}}]
    if "representative" in low:
        return [{"tool": "representatives", "params": {"topic_id": topic_id}}]
    if "topic" in low or "theme" in low or "cluster" in low:
        return [{"tool": "fit_topics", "params": {}}]
    if "similar" in low:
        uid = _UID_TOKEN.search(text)
        if uid:
            return [{"tool": "recommend_similar", "params": {"uid": uid.group(1)}}]
    if "author" in low or "researcher" in low:
        return [{"tool": "active_researchers", "params": {}}]
    if "group" in low or "communit" in low:
        return [{"tool": "communities", "params": {}}]
    if "interdisciplinary" in low or "bridg" in low:
        return [{"tool": "bridging_keywords", "params": {}}]
    if "influential" in low or "impact" in low:
        return [{"tool": "pagerank", "params": {}}]
    if "idea" in low or "gap" in low:
        return [{"tool": "predict_links", "params": {}}]
    return [{"tool": "rag_answer", "params": {"question": text}}]
