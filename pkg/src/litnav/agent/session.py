"""Two-agent conversation engine: query design, retrieval, analysis.

A session moves through five states. Drafting turns the first message into a
boolean query; AwaitingConfirmation loops on refinement until the user
approves; approval triggers the retrieval pipeline (search, embed, graph,
topic fit) and lands in Ready; each analysis request passes through Analyzing
and back. Message sequence numbers are logical, so a scripted provider over a
fixed corpus yields byte-identical transcripts run after run.
"""

from __future__ import annotations

import json
import secrets
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, MutableMapping, Optional, Sequence

import jsonschema

from ..bkg import build_bkg
from ..corpus import CorpusStore, store_from_records
from ..embed import EmbedError, HashingEmbedder
from ..mining import DEFAULT_PARAMS, MiningParams, build_topic_model
from ..querylang import Node, ParseError, parse_query, render_query, search
from .providers import ProviderError
from .templates import render, templates_checksum
from .tools import (
    REGISTRY,
    TOOLCALL_ARRAY_SCHEMA,
    ToolCall,
    ToolContext,
    ToolError,
    registry_prompt,
    render_envelope,
    route_text,
    run_tool,
    validate_call,
)


class SessionState(str, Enum):
    DRAFTING = "drafting"
    AWAITING_CONFIRMATION = "awaiting_confirmation"
    RETRIEVING = "retrieving"
    READY = "ready"
    ANALYZING = "analyzing"


class DraftFailed(Exception):
    pass


class IllegalTransition(Exception):
    pass


@dataclass(frozen=True)
class ChatMessage:
    seq: int
    role: str
    text: str
    meta: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"seq": self.seq, "role": self.role, "text": self.text, "meta": dict(self.meta)}


class Session:
    """Mutable per-conversation state; history is append-only."""

    def __init__(self, session_id: str, corpus_id: str = "default"):
        self.id = session_id
        self.state = SessionState.DRAFTING
        self.draft: Optional[Node] = None
        self.history: list[ChatMessage] = []
        self.provenance: list[dict] = []
        self.corpus_id = corpus_id
        self.store: Optional[CorpusStore] = None
        self.bkg = None
        self.embeddings: dict = {}
        self.model = None
        self.skipped_embeddings = 0
        self.provider_calls = 0
        self._seq = 0

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def say(self, role: str, text: str, **meta) -> ChatMessage:
        msg = ChatMessage(self._next_seq(), role, text, meta)
        self.history.append(msg)
        return msg

    def log(self, event: str, **detail) -> None:
        self.provenance.append({"seq": self._next_seq(), "event": event, **detail})

    def draft_text(self) -> Optional[str]:
        return render_query(self.draft) if self.draft is not None else None


def new_session(corpus_id: str = "default") -> Session:
    session = Session(secrets.token_hex(16), corpus_id)
    session.log("templates", checksum=templates_checksum())
    return session


def load_exemplars(path=None) -> list[dict]:
    """The in-context question/query pairs shown to the drafting agent."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("litnav").joinpath("data", "exemplars.json").read_text(
            encoding="utf-8"
        )
    data = json.loads(text)
    if not isinstance(data, list) or not all(
        isinstance(e, dict) and isinstance(e.get("question"), str) and isinstance(e.get("query"), str)
        for e in data
    ):
        raise ValueError("exemplar file must be a JSON array of {question, query} objects")
    return data


@dataclass
class AgentRuntime:
    """Everything a session needs besides its own state.

    corpus is the default search corpus; corpora holds uploaded ones keyed
    by corpus id.
    """

    provider: Any
    corpus: Optional[CorpusStore] = None
    corpora: MutableMapping[str, CorpusStore] = field(default_factory=dict)
    embedder: Any = None
    params: MiningParams = DEFAULT_PARAMS
    exemplars: Sequence[Mapping[str, str]] = ()
    rag_k: int = 8

    def __post_init__(self):
        if self.embedder is None:
            self.embedder = HashingEmbedder()
        if not self.exemplars:
            self.exemplars = tuple(load_exemplars())

    def resolve_store(self, corpus_id: str) -> CorpusStore:
        if corpus_id == "default":
            if self.corpus is None:
                raise KeyError("no default corpus is configured")
            return self.corpus
        if corpus_id in self.corpora:
            return self.corpora[corpus_id]
        raise KeyError(f"unknown corpus {corpus_id!r}")


class CountingProvider:
    """Pass-through that counts completions into the session record.

    The count persists with the session so a scripted provider can resume
    exactly where it stopped after a service restart.
    """

    def __init__(self, inner, session: Session):
        self.inner = inner
        self.session = session

    def complete(self, messages, response_format=None) -> str:
        self.session.provider_calls += 1
        return self.inner.complete(messages, response_format)

    def name(self) -> str:
        return self.inner.name()


QUERY_SCHEMA = {
    "type": "object",
    "properties": {"query": {"type": "string", "minLength": 1}},
    "required": ["query"],
    "additionalProperties": False,
}


def _provider_json(provider, messages: list[dict], schema: dict):
    """Complete in JSON mode; one corrective retry on schema violation."""
    raw = provider.complete(messages, schema)
    for attempt in range(2):
        try:
            data = json.loads(raw)
            jsonschema.validate(instance=data, schema=schema)
            return data
        except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
            if attempt == 1:
                raise ProviderError(f"provider returned invalid JSON twice: {exc}") from None
            retry = messages + [
                {"role": "assistant", "content": raw},
                {"role": "user", "content": "Reply again with valid JSON matching the required schema."},
            ]
            raw = provider.complete(retry, schema)


def _exemplar_block(exemplars: Sequence[Mapping[str, str]]) -> str:
    return "\n".join(f"Q: {ex['question']}\nQuery: {ex['query']}" for ex in exemplars)


def _parse_provider_query(provider, messages: list[dict]) -> tuple[Node, int]:
    """Parse the provider's query, allowing one repair round."""
    data = _provider_json(provider, messages, QUERY_SCHEMA)
    try:
        return parse_query(data["query"]), 0
    except (ParseError, ValueError) as exc:
        repair = messages + [
            {"role": "assistant", "content": json.dumps(data)},
            {
                "role": "user",
                "content": f"That query failed to parse: {exc}. Return corrected JSON.",
            },
        ]
        data = _provider_json(provider, repair, QUERY_SCHEMA)
        try:
            return parse_query(data["query"]), 1
        except (ParseError, ValueError) as exc2:
            raise DraftFailed(f"could not produce a valid query: {exc2}") from None


def draft_query(provider, user_text: str, exemplars: Sequence[Mapping[str, str]]) -> tuple[Node, int]:
    """Draft a boolean query from a research question. Returns (ast, repairs)."""
    if not user_text.strip():
        raise ValueError("empty user text")
    prompt = render(
        "prompts",
        "draft_query",
        {"examples": _exemplar_block(exemplars), "question": user_text},
    )
    return _parse_provider_query(provider, [{"role": "user", "content": prompt}])


def refine_query(provider, draft: Node, feedback: str) -> tuple[Node, int]:
    """Revise an existing draft from user feedback. Returns (ast, repairs)."""
    if not feedback.strip():
        raise ValueError("empty feedback")
    prompt = render(
        "prompts",
        "refine_query",
        {"query": render_query(draft), "feedback": feedback},
    )
    return _parse_provider_query(provider, [{"role": "user", "content": prompt}])


_APPROVALS = frozenset(
    {"approve", "approved", "yes", "ok", "okay", "confirm", "looks good", "go ahead", "run it"}
)


def approval_intent(text: str) -> bool:
    """Exact-match convenience detector; anything ambiguous is refinement."""
    return text.strip().lower().rstrip(".!") in _APPROVALS


def select_tools(provider, user_text: str) -> tuple[list[ToolCall], list[dict], bool]:
    """Ask the provider for tool calls; fall back to the keyword router.

    Returns (calls, dropped entries with reasons, fallback_used). The result
    always contains at least one valid call.
    """
    prompt = render(
        "prompts",
        "select_tools",
        {"registry": registry_prompt(), "question": user_text},
    )
    dropped: list[dict] = []
    calls: list[ToolCall] = []
    try:
        entries = _provider_json(
            provider, [{"role": "user", "content": prompt}], TOOLCALL_ARRAY_SCHEMA
        )
    except ProviderError as exc:
        dropped.append({"tool": None, "reason": f"provider failed: {exc}"})
        entries = []
    for entry in entries:
        tool = entry.get("tool")
        params = entry.get("params", {})
        reason = validate_call(tool, params)
        if reason:
            dropped.append({"tool": tool, "reason": reason})
        else:
            calls.append(ToolCall(tool, params))
    if calls:
        return calls, dropped, False
    fallback = [ToolCall(e["tool"], e["params"]) for e in route_text(user_text)]
    return fallback, dropped, True


def compose_response(envelopes: Sequence[dict]) -> str:
    """Render envelopes into one response, sections in registry order."""
    order = {name: i for i, name in enumerate(REGISTRY)}
    ordered = sorted(envelopes, key=lambda e: order[e["tool"]])
    return "\n\n".join(render_envelope(e) for e in ordered)


def _build_artifacts(session: Session, store: CorpusStore, runtime: AgentRuntime) -> list[str]:
    """Run the retrieval pipeline for the confirmed draft; returns hit uids."""
    uids = search(session.draft, store)
    if not uids:
        return []
    sub = store_from_records([store.records[u] for u in uids])
    embeddings: dict = {}
    skipped = 0
    for uid in sorted(sub.records):
        rec = sub.records[uid]
        try:
            embeddings[uid] = runtime.embedder.embed_batch([f"{rec.title} {rec.abstract}"])[0]
        except EmbedError:
            skipped += 1
    session.store = sub
    session.embeddings = embeddings
    session.skipped_embeddings = skipped
    session.bkg = build_bkg(sub, embeddings)
    session.model = (
        build_topic_model(sub, embeddings, runtime.params) if len(embeddings) >= 2 else None
    )
    return uids


def _do_retrieval(session: Session, runtime: AgentRuntime) -> None:
    store = runtime.resolve_store(session.corpus_id)
    session.state = SessionState.RETRIEVING
    session.log("state", state=SessionState.RETRIEVING.value)
    query_text = render_query(session.draft)
    uids = _build_artifacts(session, store, runtime)
    if not uids:
        session.state = SessionState.AWAITING_CONFIRMATION
        session.log("retrieved", query=query_text, count=0)
        session.say(
            "assistant",
            render("templates", "no_results", {"query": query_text}),
            kind="retrieval",
            count=0,
        )
        return
    model = session.model
    session.state = SessionState.READY
    session.log(
        "retrieved",
        query=query_text,
        count=len(uids),
        embedded=len(session.embeddings),
        skipped=session.skipped_embeddings,
        topics=model.k if model else 0,
    )
    session.say(
        "assistant",
        render(
            "templates",
            "retrieved",
            {
                "count": len(uids),
                "query": query_text,
                "embedded": len(session.embeddings),
                "skipped": session.skipped_embeddings,
                "topics": model.k if model else 0,
                "outliers": model.outlier_count if model else 0,
            },
        ),
        kind="retrieval",
        count=len(uids),
    )


def _handle_draft(session: Session, text: str, provider, runtime: AgentRuntime) -> None:
    try:
        ast, repairs = draft_query(provider, text, runtime.exemplars)
    except (DraftFailed, ProviderError) as exc:
        session.log("draft_failed", error=str(exc))
        session.say(
            "assistant",
            render("templates", "draft_failed", {"error": str(exc)}),
            kind="error",
        )
        return
    session.draft = ast
    query_text = render_query(ast)
    session.log("draft", query=query_text, repairs=repairs)
    session.state = SessionState.AWAITING_CONFIRMATION
    session.say(
        "assistant",
        render("templates", "draft_confirm", {"query": query_text}),
        kind="draft",
        query=query_text,
    )


def _handle_refine(session: Session, text: str, provider, runtime: AgentRuntime) -> None:
    try:
        ast, repairs = refine_query(provider, session.draft, text)
    except (DraftFailed, ProviderError) as exc:
        session.log("refine_failed", error=str(exc))
        session.say(
            "assistant",
            render("templates", "draft_failed", {"error": str(exc)}),
            kind="error",
        )
        return
    session.draft = ast
    query_text = render_query(ast)
    session.log("refine", query=query_text, repairs=repairs)
    session.say(
        "assistant",
        render("templates", "draft_confirm", {"query": query_text}),
        kind="draft",
        query=query_text,
    )


def _handle_analysis(session: Session, text: str, provider, runtime: AgentRuntime) -> None:
    session.state = SessionState.ANALYZING
    session.log("state", state=SessionState.ANALYZING.value)
    calls, dropped, fallback = select_tools(provider, text)
    for entry in dropped:
        session.log("dropped_call", **entry)
    if fallback:
        session.log("fallback_router", question=text)
    order = {name: i for i, name in enumerate(REGISTRY)}
    calls.sort(key=lambda c: order[c.tool])
    ctx = ToolContext(
        store=session.store,
        bkg=session.bkg,
        embeddings=session.embeddings,
        model=session.model,
        params=runtime.params,
        provider=provider,
        embedder=runtime.embedder,
        rag_k=runtime.rag_k,
    )
    sections: list[str] = []
    tools_used: list[str] = []
    for call in calls:
        tools_used.append(call.tool)
        try:
            envelope = run_tool(call, ctx)
            session.log(
                "tool",
                tool=call.tool,
                params=dict(envelope["params"]),
                provenance=envelope["provenance"],
            )
            sections.append(render_envelope(envelope))
        except ToolError as exc:
            session.log("tool_error", tool=call.tool, error=str(exc))
            sections.append(
                render(
                    "templates",
                    "tool_error",
                    {
                        "tool": call.tool,
                        "message": str(exc),
                        "n": len(session.store.records) if session.store else 0,
                    },
                )
            )
    session.state = SessionState.READY
    session.say("assistant", "\n\n".join(sections), kind="analysis", tools=tools_used)


def advance(session: Session, text: str, runtime: AgentRuntime) -> list[ChatMessage]:
    """Process one user message; returns every message appended by the turn."""
    if not text or not text.strip():
        raise ValueError("empty message")
    provider = CountingProvider(runtime.provider, session)
    start = len(session.history)
    session.say("user", text)
    if session.state is SessionState.DRAFTING:
        _handle_draft(session, text, provider, runtime)
    elif session.state is SessionState.AWAITING_CONFIRMATION:
        if approval_intent(text):
            session.log("approved", corpus=session.corpus_id, via="message")
            _do_retrieval(session, runtime)
        else:
            _handle_refine(session, text, provider, runtime)
    elif session.state is SessionState.READY:
        _handle_analysis(session, text, provider, runtime)
    else:
        session.say(
            "assistant",
            render(
                "templates",
                "illegal",
                {"state": session.state.value, "hint": "wait for the current step to finish"},
            ),
            kind="error",
        )
    return session.history[start:]


def approve(session: Session, runtime: AgentRuntime, corpus_id: Optional[str] = None) -> list[ChatMessage]:
    """Explicit approval action (the authoritative route, e.g. a UI button)."""
    if session.state is not SessionState.AWAITING_CONFIRMATION or session.draft is None:
        raise IllegalTransition(
            f"approval requires a drafted query awaiting confirmation (state: {session.state.value})"
        )
    start = len(session.history)
    if corpus_id:
        session.corpus_id = corpus_id
    session.say("user", "approve", kind="approval", via="action")
    session.log("approved", corpus=session.corpus_id, via="action")
    _do_retrieval(session, runtime)
    return session.history[start:]


def transcript(session: Session) -> str:
    """Deterministic textual form of the whole conversation."""
    return json.dumps(
        [m.to_dict() for m in session.history],
        sort_keys=True,
        ensure_ascii=False,
        indent=1,
    )


def session_to_json(session: Session) -> dict:
    return {
        "id": session.id,
        "state": session.state.value,
        "corpus_id": session.corpus_id,
        "draft": session.draft_text(),
        "history": [m.to_dict() for m in session.history],
        "provenance": session.provenance,
        "seq": session._seq,
        "provider_calls": session.provider_calls,
        "skipped_embeddings": session.skipped_embeddings,
    }


def session_from_json(data: Mapping[str, Any]) -> Session:
    session = Session(data["id"], data.get("corpus_id", "default"))
    session.state = SessionState(data["state"])
    if data.get("draft"):
        session.draft = parse_query(data["draft"])
    session.history = [
        ChatMessage(m["seq"], m["role"], m["text"], m.get("meta", {}))
        for m in data.get("history", [])
    ]
    session.provenance = list(data.get("provenance", []))
    session._seq = data.get("seq", 0)
    session.provider_calls = data.get("provider_calls", 0)
    session.skipped_embeddings = data.get("skipped_embeddings", 0)
    return session


def rebuild_artifacts(session: Session, runtime: AgentRuntime) -> None:
    """Recompute retrieval artifacts for a resumed session.

    The pipeline is deterministic, so a rebuilt session behaves identically
    to the one that was persisted.
    """
    if session.draft is None or session.state not in (
        SessionState.READY,
        SessionState.ANALYZING,
    ):
        return
    store = runtime.resolve_store(session.corpus_id)
    _build_artifacts(session, store, runtime)
