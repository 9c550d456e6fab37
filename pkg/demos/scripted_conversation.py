"""A full conversation against the bundled corpus, no network required.

Drives the two-phase agent with the built-in deterministic provider:
draft a query from a question, refine it with feedback, approve it, then
ask analysis questions answered by the mining tools. The same engine sits
behind the HTTP service; run `python -m litnav.service` to chat over REST.
"""

import textwrap
from pathlib import Path

from litnav.agent import AgentRuntime, SessionState, StubLlm, advance, new_session
from litnav.corpus import load_corpus

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ai4health_50.jsonl"

TURNS = [
    "What do we know about large language models in clinical settings?",
    "Broaden it to cover mental health chatbots too.",
    "Looks good",
    "What are the main topics in this corpus?",
    "Who are the most active researchers?",
    "What does the evidence say about safety risks?",
]


def main() -> None:
    runtime = AgentRuntime(provider=StubLlm(), corpus=load_corpus(FIXTURE))
    session = new_session()
    for turn in TURNS:
        for message in advance(session, turn, runtime):
            prefix = "you" if message.role == "user" else "bot"
            body = textwrap.indent(message.text, " " * 7).lstrip()
            print(f"[{prefix}] {body}")
        print()
    print(f"final state: {session.state.value}")
    assert session.state is SessionState.READY


if __name__ == "__main__":
    main()
