import type {
  ApproveResponse,
  CorpusUploadResponse,
  LandscapePayload,
  MessageResponse,
  SessionView,
  TopicDetail,
} from "./types.js";

/** Error body from the service, always `{error: {code, message}}`. */
export class ApiRequestError extends Error {
  readonly code: number;

  constructor(code: number, message: string) {
    super(message);
    this.name = "ApiRequestError";
    this.code = code;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the documented REST routes; nothing else. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      const err = (body as { error?: { code?: number; message?: string } }).error;
      throw new ApiRequestError(err?.code ?? response.status, err?.message ?? "request failed");
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  createSession(): Promise<{ session_id: string; state: string }> {
    return this.post("/api/sessions");
  }

  getSession(sid: string): Promise<SessionView> {
    return this.request(`/api/sessions/${sid}`);
  }

  postMessage(sid: string, text: string): Promise<MessageResponse> {
    return this.post(`/api/sessions/${sid}/messages`, { text });
  }

  approve(sid: string, corpusId?: string): Promise<ApproveResponse> {
    return this.post(`/api/sessions/${sid}/approve`, corpusId ? { corpus_id: corpusId } : {});
  }

  landscape(sid: string): Promise<LandscapePayload> {
    return this.request(`/api/sessions/${sid}/landscape`);
  }

  topic(sid: string, tid: number): Promise<TopicDetail> {
    return this.request(`/api/sessions/${sid}/topics/${tid}`);
  }

  uploadCorpus(jsonl: string): Promise<CorpusUploadResponse> {
    return this.request("/api/corpora", { method: "POST", body: jsonl });
  }
}
