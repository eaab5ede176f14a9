import { describe, expect, it } from "vitest";

import { ApiClient, type Transport } from "../src/api.js";
import { SessionController } from "../src/session.js";
import { stateFixture } from "./fixtures.js";
import type { Phase, SessionStateView } from "../src/types.js";

/** In-memory stand-in for the service with a request log. */
class FakeService {
  calls: string[] = [];
  phase: Phase = "awaiting_utterance";
  failNext: "conflict" | "network" | null = null;

  private stateFor(): SessionStateView {
    if (this.phase === "awaiting_utterance") {
      return stateFixture({ phase: this.phase, agent: null, seen: [], distribution: [], utterance: null });
    }
    return stateFixture({ phase: this.phase });
  }

  transport: Transport = async (url, init) => {
    const method = init?.method ?? "GET";
    this.calls.push(`${method} ${url}`);
    if (this.failNext === "network") {
      this.failNext = null;
      throw new TypeError("fetch failed");
    }
    if (this.failNext === "conflict") {
      this.failNext = null;
      return {
        status: 409,
        json: async () => ({ code: "phase_violation", message: "wrong phase", phase: this.phase }),
      };
    }
    if (url.endsWith("/sessions") && method === "POST") {
      this.phase = "awaiting_utterance";
      return { status: 200, json: async () => ({ session_id: "s1", arena_snapshot: this.stateFor().arena }) };
    }
    if (url.endsWith("/state")) {
      return { status: 200, json: async () => this.stateFor() };
    }
    if (url.endsWith("/utterance")) {
      this.phase = "searching";
      return { status: 200, json: async () => ({ tokens: ["the", "big", "one"], phase: this.phase }) };
    }
    if (url.endsWith("/step")) {
      this.phase = "awaiting_feedback";
      return {
        status: 200,
        json: async () => ({ phase: this.phase, resolution: "committed" }),
      };
    }
    if (url.endsWith("/feedback")) {
      this.phase = "awaiting_utterance";
      return { status: 200, json: async () => ({ phase: this.phase, deltas: {} }) };
    }
    return { status: 404, json: async () => ({ code: "not_found", message: url }) };
  };
}

function setup() {
  const service = new FakeService();
  const controller = new SessionController(new ApiClient("", service.transport));
  return { service, controller };
}

describe("session controller", () => {
  it("emits zero requests for actions the phase forbids", async () => {
    const { service, controller } = setup();

    // no session yet: nothing but newSession may touch the network
    for (const blocked of [controller.utter("x"), controller.step(), controller.feedback(1)]) {
      expect(await blocked).toEqual({ sent: false, ok: false });
    }
    expect(service.calls).toHaveLength(0);

    await controller.newSession(0);
    const afterCreate = service.calls.length;
    expect(controller.phase).toBe("awaiting_utterance");
    expect(await controller.step()).toEqual({ sent: false, ok: false });
    expect(await controller.feedback(1)).toEqual({ sent: false, ok: false });
    expect(service.calls).toHaveLength(afterCreate);

    await controller.utter("the big one");
    const whileSearching = service.calls.length;
    expect(controller.phase).toBe("searching");
    expect(await controller.feedback(-1)).toEqual({ sent: false, ok: false });
    expect(await controller.utter("again")).toEqual({ sent: false, ok: false });
    expect(service.calls).toHaveLength(whileSearching);
  });

  it("mirrors the service phases through a full episode", async () => {
    const { controller } = setup();
    await controller.newSession(0);
    await controller.utter("the big one");
    await controller.stepToCommit();
    expect(controller.phase).toBe("awaiting_feedback");
    const outcome = await controller.feedback(1);
    expect(outcome).toEqual({ sent: true, ok: true });
    expect(controller.phase).toBe("awaiting_utterance");
  });

  it("surfaces a service conflict as a notice without mutating state", async () => {
    const { service, controller } = setup();
    await controller.newSession(0);
    const snapshot = controller.state;
    service.failNext = "conflict";
    const outcome = await controller.utter("the big one");
    expect(outcome).toEqual({ sent: true, ok: false });
    expect(controller.notice).toMatch(/phase_violation/);
    expect(controller.state).toBe(snapshot);
  });

  it("raises the retry banner on network failure and keeps local state", async () => {
    const { service, controller } = setup();
    await controller.newSession(0);
    const snapshot = controller.state;
    service.failNext = "network";
    const outcome = await controller.utter("the big one");
    expect(outcome).toEqual({ sent: true, ok: false });
    expect(controller.retryBanner).toBe(true);
    expect(controller.notice).toBeNull();
    expect(controller.state).toBe(snapshot);
  });
});
