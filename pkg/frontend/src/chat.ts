import type { ChatMessage } from "./types.js";

export interface ChatHandlers {
  onApprove(): void;
  onRefine(): void;
}

function bubble(message: ChatMessage): HTMLElement {
  const row = document.createElement("div");
  row.className = `msg msg-${message.role}`;
  const body = document.createElement("div");
  body.className = "msg-text";
  // textContent, never innerHTML: message text is untrusted
  body.textContent = message.text;
  row.appendChild(body);
  return row;
}

/** The monospace confirmation card shown under a draft reply. */
function confirmationCard(query: string, handlers: ChatHandlers): HTMLElement {
  const card = document.createElement("div");
  card.className = "confirm-card";
  const code = document.createElement("code");
  code.className = "confirm-query";
  code.textContent = query;
  card.appendChild(code);

  const actions = document.createElement("div");
  actions.className = "confirm-actions";
  const approve = document.createElement("button");
  approve.className = "approve-btn";
  approve.textContent = "Approve";
  approve.addEventListener("click", () => handlers.onApprove());
  const refine = document.createElement("button");
  refine.className = "refine-btn";
  refine.textContent = "Refine";
  refine.addEventListener("click", () => handlers.onRefine());
  actions.append(approve, refine);
  card.appendChild(actions);
  return card;
}

/** Re-render the whole transcript; the card attaches to the last draft. */
export function renderTranscript(
  container: HTMLElement,
  messages: ChatMessage[],
  handlers: ChatHandlers,
): void {
  container.textContent = "";
  const lastDraft = [...messages].reverse().find((m) => m.meta["kind"] === "draft");
  for (const message of messages) {
    const row = bubble(message);
    if (message === lastDraft && typeof message.meta["query"] === "string") {
      row.appendChild(confirmationCard(message.meta["query"], handlers));
    }
    container.appendChild(row);
  }
  container.scrollTop = container.scrollHeight;
}

/** Inline error banner; 409 adds the retry hint from the busy contract. */
export function renderError(container: HTMLElement, code: number, message: string): void {
  const note = document.createElement("div");
  note.className = "error-banner";
  note.textContent = code === 409 ? `${message} (still working, retry in a moment)` : message;
  container.appendChild(note);
  container.scrollTop = container.scrollHeight;
}

export function setBusy(input: HTMLInputElement, send: HTMLButtonElement, busy: boolean): void {
  input.disabled = busy;
  send.disabled = busy;
  send.textContent = busy ? "..." : "Send";
}
