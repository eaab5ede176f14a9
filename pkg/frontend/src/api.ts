/** Thin typed client over the session service; every method is one endpoint. */

import type {
  ArenaSnapshot,
  FeedbackResponse,
  LexiconIndexEntry,
  LexiconWordView,
  Phase,
  SessionStateView,
  StepResponse,
} from "./types.js";

/** Minimal fetch-shaped transport so tests can count or fake requests. */
export type Transport = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly phase?: Phase,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly transport: Transport = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<Transport>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.transport(this.baseUrl + path, init);
    const payload = (await resp.json()) as Record<string, unknown>;
    if (resp.status >= 400) {
      throw new ApiError(
        resp.status,
        String(payload["code"] ?? "error"),
        String(payload["message"] ?? `request failed with ${resp.status}`),
        payload["phase"] as Phase | undefined,
      );
    }
    return payload as T;
  }

  createSession(body: {
    seed?: number;
    frame?: "speaker" | "agent";
    arena_config?: unknown;
  } = {}): Promise<{ session_id: string; arena_snapshot: ArenaSnapshot }> {
    return this.request("POST", "/sessions", body);
  }

  state(sessionId: string): Promise<SessionStateView> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  utterance(sessionId: string, text: string): Promise<{ tokens: string[]; phase: Phase }> {
    return this.request("POST", `/sessions/${sessionId}/utterance`, { text });
  }

  step(sessionId: string): Promise<StepResponse> {
    return this.request("POST", `/sessions/${sessionId}/step`, {});
  }

  feedback(sessionId: string, sign: 1 | -1): Promise<FeedbackResponse> {
    return this.request("POST", `/sessions/${sessionId}/feedback`, { sign });
  }

  endSession(sessionId: string): Promise<{ phase: Phase }> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  lexiconIndex(): Promise<{ words: LexiconIndexEntry[] }> {
    return this.request("GET", "/lexicon");
  }

  lexiconWord(word: string): Promise<LexiconWordView> {
    return this.request("GET", `/lexicon/${encodeURIComponent(word)}`);
  }
}
