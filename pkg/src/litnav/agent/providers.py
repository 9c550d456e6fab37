"""LLM provider implementations behind one small contract.

A provider turns a message list into text, optionally constrained by a JSON
schema. The scripted provider replays a fixed list of replies for tests and
offline demos, the stub provider synthesizes deterministic replies with no
model at all, and the remote provider talks to an HTTP completion endpoint.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import httpx
from typing import Mapping, Optional, Protocol, Sequence, runtime_checkable

from ..querylang import tokenize_text
from .tools import route_text


class ProviderError(RuntimeError):
    pass


@runtime_checkable
class LlmProvider(Protocol):
    def complete(
        self,
        messages: Sequence[Mapping[str, str]],
        response_format: Optional[dict] = None,
    ) -> str: ...

    def name(self) -> str: ...


class ScriptedProvider:
    """Replays a fixed reply list; call n returns reply n.

    The cursor can start mid-script so a persisted session resumes exactly
    where it stopped. Prompts are recorded for assertions.
    """

    def __init__(self, replies: Sequence[str], start: int = 0, label: str = "scripted"):
        self.replies = list(replies)
        self.cursor = start
        self.label = label
        self.calls: list[dict] = []

    @staticmethod
    def from_file(path, start: int = 0) -> "ScriptedProvider":
        replies = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(replies, list) or not all(isinstance(r, str) for r in replies):
            raise ProviderError(f"script file {path} must hold a JSON array of strings")
        return ScriptedProvider(replies, start=start)

    def complete(
        self,
        messages: Sequence[Mapping[str, str]],
        response_format: Optional[dict] = None,
    ) -> str:
        self.calls.append({"messages": list(messages), "response_format": response_format})
        if self.cursor >= len(self.replies):
            raise ProviderError(
                f"script exhausted after {len(self.replies)} replies"
            )
        reply = self.replies[self.cursor]
        self.cursor += 1
        return reply

    def name(self) -> str:
        return self.label


_STOPWORDS = frozenset(
    """a an and are as at be been by can could do does for from has have how i in
    is it its me my of on or s should tell that the their them there these they
    this to us use used using want we what which who will with would you your
    know like show about more some any study studies research researchers papers
    paper explored explore field work works recent also include included
    including add adding please focus""".split()
)

_QUERY_LINE = re.compile(r"Current query:\s*(.+)")
_FEEDBACK_LINE = re.compile(r"Feedback:\s*(.+)")
_QUESTION_LINE = re.compile(r"Question:\s*(.+)")
_REQUEST_LINE = re.compile(r"User request:\s*(.+)")
# line-anchored so the instruction's example id is never picked up
_CITE = re.compile(r"^\[([^\[\]\s]+)\]", re.MULTILINE)


class StubLlm:
    """Deterministic no-model provider.

    Good enough to drive the whole pipeline offline: drafts a TS query from
    the question's distinctive tokens, appends feedback tokens on refinement,
    routes tool selection with the keyword router, and answers RAG prompts by
    citing the first listed abstract.
    """

    def _content_tokens(self, text: str, limit: int = 4) -> list[str]:
        seen: list[str] = []
        for tok in tokenize_text(text):
            if tok in _STOPWORDS or tok in seen:
                continue
            seen.append(tok)
            if len(seen) == limit:
                break
        return seen

    def _draft(self, question: str) -> str:
        tokens = self._content_tokens(question)
        if not tokens:
            return "TS=(research)"
        return f"TS=({' OR '.join(tokens)})"

    def _refine(self, current: str, feedback: str) -> str:
        fresh = [t for t in self._content_tokens(feedback) if t not in current.lower()]
        if not fresh:
            return current
        return f"({current}) AND TS=({' OR '.join(fresh)})"

    def complete(
        self,
        messages: Sequence[Mapping[str, str]],
        response_format: Optional[dict] = None,
    ) -> str:
        text = messages[-1]["content"]
        if response_format is not None and response_format.get("type") == "array":
            match = _REQUEST_LINE.search(text)
            request = match.group(1) if match else text
            return json.dumps(route_text(request))
        if response_format is not None:
            current = _QUERY_LINE.search(text)
            if current:
                feedback = _FEEDBACK_LINE.search(text)
                revised = self._refine(
                    current.group(1).strip(), feedback.group(1) if feedback else ""
                )
                return json.dumps({"query": revised})
            question = _QUESTION_LINE.search(text)
            return json.dumps(
                {"query": self._draft(question.group(1) if question else text)}
            )
        cite = _CITE.search(text)
        if cite:
            return (
                "Based on the retrieved abstracts, the most relevant evidence "
                f"is in [{cite.group(1)}]."
            )
        return "I could not find supporting abstracts for that question."

    def name(self) -> str:
        return "stub-llm"


class RemoteProvider:
    """HTTP completion endpoint adapter.

    POSTs ``{"messages": [...], "response_format": ...}`` and expects
    ``{"text": "..."}`` back. One retry, then the error surfaces.
    """

    def __init__(self, endpoint: str, api_key: Optional[str] = None, attempts: int = 2):
        self.endpoint = endpoint
        self.api_key = api_key
        self.attempts = attempts

    def complete(
        self,
        messages: Sequence[Mapping[str, str]],
        response_format: Optional[dict] = None,
    ) -> str:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        payload = {"messages": list(messages), "response_format": response_format}
        last_error: Exception | None = None
        for _ in range(self.attempts):
            try:
                resp = httpx.post(self.endpoint, json=payload, headers=headers, timeout=60.0)
                resp.raise_for_status()
                return resp.json()["text"]
            except Exception as exc:  # noqa: BLE001 - retried, then surfaced
                last_error = exc
        raise ProviderError(f"provider request failed: {last_error}")

    def name(self) -> str:
        return f"remote:{self.endpoint}"
