"""Conversational agents: query drafting, tool selection, templated answers."""

from .providers import LlmProvider, ProviderError, RemoteProvider, ScriptedProvider, StubLlm
from .session import (
    AgentRuntime,
    ChatMessage,
    CountingProvider,
    DraftFailed,
    IllegalTransition,
    Session,
    SessionState,
    advance,
    approval_intent,
    approve,
    compose_response,
    draft_query,
    load_exemplars,
    new_session,
    refine_query,
    rebuild_artifacts,
    select_tools,
    session_from_json,
    session_to_json,
    transcript,
)
from .templates import TemplateError, load_template, render, render_template, templates_checksum
from .tools import (
    REGISTRY,
    ToolCall,
    ToolContext,
    ToolError,
    ToolSpec,
    guard_citations,
    registry_prompt,
    render_envelope,
    route_text,
    run_tool,
    validate_call,
)

__all__ = [
    "LlmProvider",
    "ProviderError",
    "RemoteProvider",
    "ScriptedProvider",
    "StubLlm",
    "AgentRuntime",
    "ChatMessage",
    "CountingProvider",
    "DraftFailed",
    "IllegalTransition",
    "Session",
    "SessionState",
    "advance",
    "approval_intent",
    "approve",
    "compose_response",
    "draft_query",
    "load_exemplars",
    "new_session",
    "refine_query",
    "rebuild_artifacts",
    "select_tools",
    "session_from_json",
    "session_to_json",
    "transcript",
    "TemplateError",
    "load_template",
    "render",
    "render_template",
    "templates_checksum",
    "REGISTRY",
    "ToolCall",
    "ToolContext",
    "ToolError",
    "ToolSpec",
    "guard_citations",
    "registry_prompt",
    "render_envelope",
    "route_text",
    "run_tool",
    "validate_call",
]
