import { ApiClient, ApiRequestError } from "./api.js";
import { renderError, renderTranscript, setBusy } from "./chat.js";
import { LandscapeView, legendEntries } from "./landscape.js";
import { renderTopicPanel, renderTopicToast } from "./topicPanel.js";
import type { ChatMessage, LandscapePayload, SessionView } from "./types.js";

export interface AppElements {
  transcript: HTMLElement;
  input: HTMLInputElement;
  send: HTMLButtonElement;
  status: HTMLElement;
  legend: HTMLElement;
  panel: HTMLElement;
  scatter: LandscapeView;
  hover: HTMLElement;
}

const POLL_MS = 750;

/** Single-page controller: one session, one outstanding request. */
export class App {
  private sid = "";
  private messages: ChatMessage[] = [];
  private busy = false;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private landscapePayload: LandscapePayload | null = null;
  private lastError: { code: number; message: string } | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
  ) {}

  async start(): Promise<void> {
    const created = await this.api.createSession();
    this.sid = created.session_id;
    this.setStatus(created.state);
    this.el.send.addEventListener("click", () => void this.send());
    this.el.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        void this.send();
      }
    });
  }

  get sessionId(): string {
    return this.sid;
  }

  private setStatus(state: string): void {
    this.el.status.textContent = state;
    this.el.status.dataset["state"] = state;
  }

  private renderMessages(): void {
    renderTranscript(this.el.transcript, this.messages, {
      onApprove: () => void this.approve(),
      onRefine: () => this.el.input.focus(),
    });
    // errors stay visible across poll re-renders until the next action
    if (this.lastError) {
      renderError(this.el.transcript, this.lastError.code, this.lastError.message);
    }
  }

  private beginRequest(): boolean {
    // mirrors the server's 409 contract client-side
    if (this.busy) {
      return false;
    }
    this.busy = true;
    this.lastError = null;
    setBusy(this.el.input, this.el.send, true);
    return true;
  }

  private endRequest(): void {
    this.busy = false;
    setBusy(this.el.input, this.el.send, false);
  }

  async send(text?: string): Promise<void> {
    const body = (text ?? this.el.input.value).trim();
    if (!body || !this.beginRequest()) {
      return;
    }
    this.el.input.value = "";
    try {
      const reply = await this.api.postMessage(this.sid, body);
      this.messages.push(...reply.messages);
      this.setStatus(reply.state);
      this.renderMessages();
      if (reply.state === "ready") {
        await this.refreshLandscape();
      }
    } catch (error) {
      this.showError(error);
    } finally {
      this.endRequest();
    }
  }

  async approve(): Promise<void> {
    if (!this.beginRequest()) {
      return;
    }
    this.setStatus("retrieving");
    try {
      const reply = await this.api.approve(this.sid);
      this.messages.push(...reply.messages);
      this.setStatus(reply.state);
      this.renderMessages();
      if (reply.state === "ready") {
        await this.refreshLandscape();
      }
    } catch (error) {
      this.showError(error);
      await this.pollUntilIdle();
    } finally {
      this.endRequest();
    }
  }

  /** Poll the session view every 750 ms while the server reports work
   *  in flight, then resync. */
  private async pollUntilIdle(): Promise<void> {
    const view: SessionView = await this.api.getSession(this.sid);
    this.messages = view.messages;
    this.setStatus(view.state);
    this.renderMessages();
    if (view.in_flight) {
      await new Promise<void>((resolve) => {
        this.pollTimer = setTimeout(() => resolve(), POLL_MS);
      });
      return this.pollUntilIdle();
    }
    if (view.state === "ready") {
      await this.refreshLandscape();
    }
  }

  async refreshLandscape(): Promise<LandscapePayload> {
    const payload = await this.api.landscape(this.sid);
    this.landscapePayload = payload;
    this.el.scatter.render(payload);
    this.renderLegend(payload);
    return payload;
  }

  private renderLegend(payload: LandscapePayload): void {
    this.el.legend.textContent = "";
    for (const entry of legendEntries(payload)) {
      const item = document.createElement("button");
      item.className = "legend-item";
      item.dataset["topic"] = String(entry.id);
      const swatch = document.createElement("span");
      swatch.className = "legend-swatch";
      swatch.style.background = entry.color;
      const label = document.createElement("span");
      label.textContent = entry.label;
      item.append(swatch, label);
      item.addEventListener("click", () => void this.openTopic(entry.id));
      this.el.legend.appendChild(item);
    }
  }

  async openTopic(tid: number): Promise<void> {
    try {
      const detail = await this.api.topic(this.sid, tid);
      renderTopicPanel(this.el.panel, detail, (prefill) => {
        this.el.input.value = prefill;
        this.el.input.focus();
      });
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === 404) {
        renderTopicToast(this.el.panel, error.message);
        return;
      }
      throw error;
    }
  }

  hover(px: number, py: number): void {
    const mark = this.el.scatter.hitTest(px, py);
    if (!mark) {
      this.el.hover.textContent = "";
      return;
    }
    this.el.hover.textContent = mark.topic === -1 ? `${mark.uid} (outlier)` : mark.uid;
  }

  private showError(error: unknown): void {
    this.lastError =
      error instanceof ApiRequestError
        ? { code: error.code, message: error.message }
        : { code: 0, message: String(error) };
    renderError(this.el.transcript, this.lastError.code, this.lastError.message);
  }

  stop(): void {
    if (this.pollTimer !== null) {
      clearTimeout(this.pollTimer);
    }
  }
}
