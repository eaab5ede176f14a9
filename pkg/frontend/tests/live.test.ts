/** Live-session fidelity against the real Python service.
 *
 * A scripted session (create → utter → step-to-commit → feedback) must leave
 * a server-side ledger identical to a library-driven episode with the same
 * seed, the inspector's weight bars must equal GET /lexicon/{word} exactly,
 * and phase-forbidden buttons must emit zero requests.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type Transport } from "../src/api.js";
import { weightBars } from "../src/lexicon.js";
import { SessionController } from "../src/session.js";

const PORT = 8977;
const BASE = `http://127.0.0.1:${PORT}`;
const SEED = 6;
const UTTERANCE = "the big round one";

const SERVER_SCRIPT = `
from wordfetch.lexicon import Lexicon
from wordfetch.server import create_app
import uvicorn
uvicorn.run(create_app(lexicon=Lexicon(rng_seed=0)), host="127.0.0.1", port=${PORT}, log_level="warning")
`;

const LIBRARY_SCRIPT = `
import json
from wordfetch.arena import build_arena
from wordfetch.defaults import DEFAULT_ARENA_CONFIG
from wordfetch.game import EpisodeLedger, episode_rng, run_episode
from wordfetch.lexicon import Lexicon

arena = build_arena(DEFAULT_ARENA_CONFIG, ${SEED})
ledger = EpisodeLedger()
run_episode(
    Lexicon(rng_seed=0), arena, ${JSON.stringify(UTTERANCE)}, target_id=None,
    mode="learning", feedback_source=lambda result: 1,
    rng=episode_rng(${SEED}, 0), ledger=ledger,
)
print(json.dumps(ledger.events))
`;

let server: ChildProcess;

beforeAll(async () => {
  server = spawn("python3", ["-c", SERVER_SCRIPT], {
    cwd: "..",
    stdio: ["ignore", "inherit", "inherit"],
  });
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/lexicon`);
      if (resp.status === 200) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}, 35_000);

afterAll(() => {
  server?.kill();
});

describe("live session fidelity", () => {
  it("scripted session ledger equals a library-driven episode, bars equal the payload, and forbidden actions stay silent", async () => {
    const calls: string[] = [];
    const transport: Transport = async (url, init) => {
      calls.push(`${init?.method ?? "GET"} ${url}`);
      const resp = await fetch(url, init);
      return resp;
    };
    const client = new ApiClient(BASE, transport);
    const controller = new SessionController(client);

    await controller.newSession(SEED);
    expect(controller.phase).toBe("awaiting_utterance");

    // forbidden while awaiting an utterance: no request may leave the client
    let before = calls.length;
    expect(await controller.step()).toEqual({ sent: false, ok: false });
    expect(await controller.feedback(1)).toEqual({ sent: false, ok: false });
    expect(calls).toHaveLength(before);

    await controller.utter(UTTERANCE);
    expect(controller.phase).toBe("searching");
    before = calls.length;
    expect(await controller.feedback(1)).toEqual({ sent: false, ok: false });
    expect(await controller.utter("again")).toEqual({ sent: false, ok: false });
    expect(calls).toHaveLength(before);

    const stepOutcome = await controller.stepToCommit();
    expect(stepOutcome.ok).toBe(true);
    expect(controller.phase).toBe("awaiting_feedback");
    before = calls.length;
    expect(await controller.step()).toEqual({ sent: false, ok: false });
    expect(calls).toHaveLength(before);

    const fb = await controller.feedback(1);
    expect(fb).toEqual({ sent: true, ok: true });
    expect(controller.state?.episode_count).toBe(1);

    // the service-side ledger must match the library episode event for event
    const expected = JSON.parse(
      execFileSync("python3", ["-c", LIBRARY_SCRIPT], { cwd: "..", encoding: "utf8" }),
    );
    expect(controller.state?.ledger_tail).toEqual(expected);

    // inspector weight bars are the /lexicon/{word} payload verbatim
    for (const token of ["the", "big", "round", "one"]) {
      const word = await client.lexiconWord(token);
      const bars = weightBars(word);
      expect(bars.map((bar) => bar.value)).toEqual(word.weights);
      expect(bars.map((bar) => bar.name)).toEqual(word.feature_names);
      expect(word.pos_count).toBe(1);
    }
  }, 30_000);
});
