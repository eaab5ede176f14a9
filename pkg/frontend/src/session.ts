/** Session controller: owns the phase mirror and serializes service calls.
 *
 * Contracts it enforces:
 *  - an action forbidden in the current phase returns without touching the
 *    network (`sent: false`);
 *  - after every mutation the full state is re-fetched, so every rendered
 *    number comes from a service payload;
 *  - a service error surfaces as an inline notice and a network failure as
 *    a retry banner, in both cases without mutating local state.
 */

import { ApiClient, ApiError } from "./api.js";
import { type Action, isAllowed } from "./phase.js";
import type { Phase, SessionStateView } from "./types.js";

export interface ActionOutcome {
  sent: boolean;
  ok: boolean;
}

const BLOCKED: ActionOutcome = { sent: false, ok: false };

export class SessionController {
  state: SessionStateView | null = null;
  notice: string | null = null;
  retryBanner = false;
  private sessionId: string | null = null;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(private readonly client: ApiClient) {}

  get phase(): Phase | null {
    return this.state?.phase ?? null;
  }

  can(action: Action): boolean {
    return isAllowed(this.phase, action);
  }

  /** All service calls run strictly one after another. */
  private serialize<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work, work);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async mutate(action: Action, send: (id: string) => Promise<unknown>): Promise<ActionOutcome> {
    if (!this.can(action)) return BLOCKED;
    const id = this.sessionId;
    if (id === null && action !== "newSession") return BLOCKED;
    return this.serialize(async () => {
      try {
        await send(id as string);
        this.state = await this.client.state(id as string);
        this.notice = null;
        this.retryBanner = false;
        return { sent: true, ok: true };
      } catch (err) {
        if (err instanceof ApiError) {
          this.notice = `${err.code}: ${err.message}`;
        } else {
          this.retryBanner = true;
        }
        return { sent: true, ok: false };
      }
    });
  }

  async newSession(seed: number, frame: "speaker" | "agent" = "speaker"): Promise<ActionOutcome> {
    return this.serialize(async () => {
      try {
        const created = await this.client.createSession({ seed, frame });
        this.sessionId = created.session_id;
        this.state = await this.client.state(this.sessionId);
        this.notice = null;
        this.retryBanner = false;
        return { sent: true, ok: true };
      } catch (err) {
        if (err instanceof ApiError) {
          this.notice = `${err.code}: ${err.message}`;
        } else {
          this.retryBanner = true;
        }
        return { sent: true, ok: false };
      }
    });
  }

  utter(text: string): Promise<ActionOutcome> {
    return this.mutate("utter", (id) => this.client.utterance(id, text));
  }

  step(): Promise<ActionOutcome> {
    return this.mutate("step", (id) => this.client.step(id));
  }

  feedback(sign: 1 | -1): Promise<ActionOutcome> {
    return this.mutate("feedback", (id) => this.client.feedback(id, sign));
  }

  /** Auto-run: keep stepping until the agent commits or an error stops us. */
  async stepToCommit(maxSteps = 64): Promise<ActionOutcome> {
    let last: ActionOutcome = BLOCKED;
    for (let i = 0; i < maxSteps && this.can("step"); i++) {
      last = await this.step();
      if (!last.ok) return last;
    }
    return last;
  }

  async refresh(): Promise<void> {
    const id = this.sessionId;
    if (id === null) return;
    await this.serialize(async () => {
      try {
        this.state = await this.client.state(id);
        this.retryBanner = false;
      } catch {
        this.retryBanner = true;
      }
    });
  }
}
