import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient } from "../src/api.js";
import { ApiRequestError } from "../src/api.js";
import { App, type AppElements } from "../src/app.js";
import { LandscapeView } from "../src/landscape.js";
import type {
  ApproveResponse,
  ChatMessage,
  LandscapePayload,
  MessageResponse,
  SessionView,
  TopicDetail,
} from "../src/types.js";
import { RecordingCtx, makePayload } from "./fakes.js";

function msg(seq: number, role: string, text: string, meta: Record<string, unknown> = {}): ChatMessage {
  return { seq, role, text, meta };
}

const QUERY = 'TS=("mental health" OR llm*) AND PY=(2020-2025)';

class FakeApi {
  calls: string[] = [];
  messageReplies: MessageResponse[] = [];
  approveReply: ApproveResponse | Error = {
    messages: [msg(4, "assistant", "Retrieved 24 papers.", { kind: "retrieval" })],
    state: "ready",
    counts: { retrieved: 24, embedded: 24, topics: 2 },
  };
  views: SessionView[] = [];
  landscapePayload: LandscapePayload = makePayload([
    { uid: "W001", x: 0, y: 0, topic: 0 },
    { uid: "W002", x: 1, y: 1, topic: -1 },
  ]);
  topicDetail: TopicDetail | Error = {
    topic_id: 0,
    size: 1,
    terms: [["health", 0.9]],
    representatives: [{ uid: "W001", title: "A title", score: 0.8 }],
    trend: [[2022, 1]],
  };
  gate: Promise<void> | null = null;

  async createSession(): Promise<{ session_id: string; state: string }> {
    this.calls.push("createSession");
    return { session_id: "s1", state: "drafting" };
  }

  async getSession(): Promise<SessionView> {
    this.calls.push("getSession");
    const next = this.views.shift();
    if (!next) {
      throw new Error("no scripted view left");
    }
    return next;
  }

  async postMessage(_sid: string, text: string): Promise<MessageResponse> {
    this.calls.push(`postMessage:${text}`);
    if (this.gate) {
      await this.gate;
    }
    const next = this.messageReplies.shift();
    if (!next) {
      throw new Error("no scripted reply left");
    }
    return next;
  }

  async approve(): Promise<ApproveResponse> {
    this.calls.push("approve");
    if (this.approveReply instanceof Error) {
      throw this.approveReply;
    }
    return this.approveReply;
  }

  async landscape(): Promise<LandscapePayload> {
    this.calls.push("landscape");
    return this.landscapePayload;
  }

  async topic(_sid: string, tid: number): Promise<TopicDetail> {
    this.calls.push(`topic:${tid}`);
    if (this.topicDetail instanceof Error) {
      throw this.topicDetail;
    }
    return this.topicDetail;
  }
}

function draftReply(): MessageResponse {
  return {
    messages: [
      msg(2, "user", "papers on llms in mental health"),
      msg(3, "assistant", "Here is my draft.", { kind: "draft", query: QUERY }),
    ],
    state: "awaiting_confirmation",
    in_flight: false,
  };
}

let api: FakeApi;
let el: AppElements;
let ctx: RecordingCtx;
let app: App;

beforeEach(async () => {
  document.body.innerHTML = "";
  api = new FakeApi();
  ctx = new RecordingCtx();
  const input = document.createElement("input");
  const send = document.createElement("button");
  el = {
    transcript: document.createElement("div"),
    input,
    send,
    status: document.createElement("span"),
    legend: document.createElement("div"),
    panel: document.createElement("div"),
    scatter: new LandscapeView(ctx, 200, 200),
    hover: document.createElement("span"),
  };
  document.body.append(el.transcript, input, send, el.status, el.legend, el.panel, el.hover);
  app = new App(api as unknown as ApiClient, el);
  await app.start();
});

afterEach(() => {
  app.stop();
  vi.useRealTimers();
});

describe("App.start", () => {
  it("creates a session and shows its state", () => {
    expect(api.calls).toEqual(["createSession"]);
    expect(el.status.textContent).toBe("drafting");
  });
});

describe("App.send", () => {
  it("posts the text and renders the draft card", async () => {
    api.messageReplies.push(draftReply());
    await app.send("papers on llms in mental health");
    expect(api.calls).toContain("postMessage:papers on llms in mental health");
    expect(el.transcript.querySelectorAll(".msg")).toHaveLength(2);
    expect(el.transcript.querySelector(".confirm-query")?.textContent).toBe(QUERY);
  });

  it("reads the input box and clears it", async () => {
    api.messageReplies.push(draftReply());
    el.input.value = "  papers on llms  ";
    await app.send();
    expect(api.calls).toContain("postMessage:papers on llms");
    expect(el.input.value).toBe("");
  });

  it("ignores empty input without a request", async () => {
    el.input.value = "   ";
    await app.send();
    expect(api.calls).toEqual(["createSession"]);
  });

  it("allows only one outstanding request", async () => {
    let release!: () => void;
    api.gate = new Promise((resolve) => {
      release = resolve;
    });
    api.messageReplies.push(draftReply());
    const first = app.send("first");
    await app.send("second");
    expect(api.calls.filter((c) => c.startsWith("postMessage:"))).toEqual(["postMessage:first"]);
    expect(el.input.disabled).toBe(true);
    release();
    await first;
    expect(el.input.disabled).toBe(false);
  });

  it("Enter in the input box sends", async () => {
    api.messageReplies.push(draftReply());
    el.input.value = "via keyboard";
    el.input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter" }));
    await vi.waitFor(() => {
      expect(api.calls).toContain("postMessage:via keyboard");
    });
  });

  it("shows the error banner on failure", async () => {
    api.messageReplies = [];
    api.postMessage = async () => {
      throw new ApiRequestError(422, "text must be non-empty");
    };
    await app.send("x");
    expect(el.transcript.querySelector(".error-banner")?.textContent).toBe(
      "text must be non-empty",
    );
  });
});

describe("App.approve", () => {
  async function draftThenApprove(): Promise<void> {
    api.messageReplies.push(draftReply());
    await app.send("papers on llms in mental health");
    (el.transcript.querySelector(".approve-btn") as HTMLButtonElement).click();
  }

  it("runs retrieval and refreshes the landscape on ready", async () => {
    await draftThenApprove();
    await vi.waitFor(() => {
      expect(el.status.textContent).toBe("ready");
    });
    expect(api.calls).toContain("approve");
    expect(api.calls).toContain("landscape");
    expect(ctx.arcs).toHaveLength(2);
    expect(el.legend.querySelectorAll(".legend-item")).toHaveLength(2);
  });

  it("on 409 shows the retry hint and resyncs by polling", async () => {
    vi.useFakeTimers();
    api.approveReply = new ApiRequestError(409, "session busy");
    api.views = [
      {
        session_id: "s1",
        state: "retrieving",
        in_flight: true,
        draft: QUERY,
        corpus_id: "default",
        messages: [msg(2, "user", "hi")],
        counts: { retrieved: 0, embedded: 0, topics: 0 },
      },
      {
        session_id: "s1",
        state: "ready",
        in_flight: false,
        draft: null,
        corpus_id: "default",
        messages: [msg(2, "user", "hi"), msg(3, "assistant", "Retrieved 24 papers.", {})],
        counts: { retrieved: 24, embedded: 24, topics: 2 },
      },
    ];
    const pending = app.approve();
    await vi.advanceTimersByTimeAsync(750);
    await pending;
    expect(el.transcript.querySelector(".error-banner")?.textContent).toBe(
      "session busy (still working, retry in a moment)",
    );
    expect(api.calls.filter((c) => c === "getSession")).toHaveLength(2);
    expect(el.status.textContent).toBe("ready");
    expect(api.calls).toContain("landscape");
  });
});

describe("App.openTopic", () => {
  it("renders the panel for a known topic", async () => {
    await app.openTopic(0);
    expect(el.panel.querySelector(".topic-title")?.textContent).toBe("Topic 0: 1 papers");
  });

  it("prefills the input when asked about the topic", async () => {
    await app.openTopic(0);
    (el.panel.querySelector(".ask-topic-btn") as HTMLButtonElement).click();
    expect(el.input.value).toBe("Tell me more about topic 0");
  });

  it("404 becomes a toast, not a crash", async () => {
    api.topicDetail = new ApiRequestError(404, "unknown topic: 9");
    await app.openTopic(9);
    expect(el.panel.querySelector(".toast")?.textContent).toContain("unknown topic: 9");
  });
});

describe("App.hover", () => {
  it("names the paper under the cursor, outliers flagged", async () => {
    await app.refreshLandscape();
    const marks = el.scatter.render(api.landscapePayload);
    const assigned = marks.find((m) => m.uid === "W001")!;
    const outlier = marks.find((m) => m.uid === "W002")!;
    app.hover(assigned.px, assigned.py);
    expect(el.hover.textContent).toBe("W001");
    app.hover(outlier.px, outlier.py);
    expect(el.hover.textContent).toBe("W002 (outlier)");
    app.hover(-40, -40);
    expect(el.hover.textContent).toBe("");
  });
});
