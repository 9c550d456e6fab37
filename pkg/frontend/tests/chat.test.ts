import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderError, renderTranscript, setBusy } from "../src/chat.js";
import type { ChatMessage } from "../src/types.js";

function msg(seq: number, role: string, text: string, meta: Record<string, unknown> = {}): ChatMessage {
  return { seq, role, text, meta };
}

describe("transcript rendering", () => {
  let container: HTMLElement;
  const handlers = { onApprove: vi.fn(), onRefine: vi.fn() };

  beforeEach(() => {
    container = document.createElement("div");
    handlers.onApprove.mockClear();
    handlers.onRefine.mockClear();
  });

  it("shows the confirmation card with the canonical query", () => {
    const canonical = 'TS=("mental health" OR llm*) AND PY=(2020-2025)';
    renderTranscript(
      container,
      [
        msg(2, "user", "mental health chatbots"),
        msg(3, "assistant", "Here is the boolean query I drafted", {
          kind: "draft",
          query: canonical,
        }),
      ],
      handlers,
    );
    const card = container.querySelector(".confirm-card");
    expect(card).not.toBeNull();
    expect(card!.querySelector(".confirm-query")!.textContent).toBe(canonical);
  });

  it("card buttons invoke the approve and refine handlers", () => {
    renderTranscript(
      container,
      [msg(1, "assistant", "draft", { kind: "draft", query: "TS=(x)" })],
      handlers,
    );
    (container.querySelector(".approve-btn") as HTMLButtonElement).click();
    (container.querySelector(".refine-btn") as HTMLButtonElement).click();
    expect(handlers.onApprove).toHaveBeenCalledTimes(1);
    expect(handlers.onRefine).toHaveBeenCalledTimes(1);
  });

  it("only the newest draft carries a card", () => {
    renderTranscript(
      container,
      [
        msg(1, "assistant", "first draft", { kind: "draft", query: "TS=(a)" }),
        msg(2, "user", "refine it"),
        msg(3, "assistant", "second draft", { kind: "draft", query: "TS=(a) AND TS=(b)" }),
      ],
      handlers,
    );
    const cards = container.querySelectorAll(".confirm-card");
    expect(cards).toHaveLength(1);
    expect(cards[0]!.querySelector(".confirm-query")!.textContent).toBe("TS=(a) AND TS=(b)");
  });

  it("renders message text verbatim without markup injection", () => {
    const text = "Topic 0 has 12 papers <script>alert(1)</script>";
    renderTranscript(container, [msg(1, "assistant", text, { kind: "analysis" })], handlers);
    expect(container.querySelector("script")).toBeNull();
    expect(container.textContent).toContain("12 papers");
  });

  it("busy state disables the composer", () => {
    const input = document.createElement("input");
    const send = document.createElement("button");
    setBusy(input, send, true);
    expect(input.disabled).toBe(true);
    expect(send.disabled).toBe(true);
    setBusy(input, send, false);
    expect(input.disabled).toBe(false);
  });

  it("409 errors carry the retry hint", () => {
    renderError(container, 409, "session is processing another message");
    const banner = container.querySelector(".error-banner");
    expect(banner!.textContent).toContain("retry");
  });

  it("other errors render the message alone", () => {
    renderError(container, 422, "text must be non-empty");
    expect(container.querySelector(".error-banner")!.textContent).toBe("text must be non-empty");
  });
});
