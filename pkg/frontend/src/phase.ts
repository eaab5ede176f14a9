/** Client-side mirror of the service's episode phase machine.
 *
 * Buttons are enabled from this table alone, which is what guarantees that
 * a phase-forbidden action can never emit a request.
 */

import type { Phase } from "./types.js";

export type Action = "utter" | "step" | "feedback" | "newSession";

const TABLE: Record<Phase, readonly Action[]> = {
  awaiting_utterance: ["utter", "newSession"],
  searching: ["step", "newSession"],
  awaiting_feedback: ["feedback", "newSession"],
  done: ["newSession"],
};

export function allowedActions(phase: Phase | null): ReadonlySet<Action> {
  if (phase === null) return new Set(["newSession"]);
  return new Set(TABLE[phase]);
}

export function isAllowed(phase: Phase | null, action: Action): boolean {
  return allowedActions(phase).has(action);
}
