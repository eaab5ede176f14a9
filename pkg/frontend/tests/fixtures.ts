import type { ArenaSnapshot, SessionStateView } from "../src/types.js";

export function arenaFixture(): ArenaSnapshot {
  const ring = (k: number, n: number) => {
    const angle = (2 * Math.PI * k) / n;
    const x = 50 + 35 * Math.cos(angle);
    const y = 50 + 35 * Math.sin(angle);
    return { x, y, heading: Math.atan2(50 - y, 50 - x) };
  };
  return {
    bounds: [100, 100],
    rng_seed: 0,
    view_range: 56.6,
    noise_sigma: 0,
    speaker_pose: ring(0, 6),
    start_pose: ring(3, 6),
    stations: [0, 1, 2, 3, 4, 5].map((k) => ring(k, 6)),
    objects: [
      { object_id: 0, shape: "cube", footprint_area: 300, major_axis: 17.3, minor_axis: 17.3, corner_count: 4, albedo: 0.9, position: [40, 45] },
      { object_id: 1, shape: "ball", footprint_area: 80, major_axis: 10.1, minor_axis: 10.1, corner_count: 0, albedo: 0.2, position: [60, 55] },
      { object_id: 2, shape: "brick", footprint_area: 150, major_axis: 20.0, minor_axis: 7.5, corner_count: 4, albedo: 0.5, position: [52, 38] },
    ],
  };
}

export function stateFixture(overrides: Partial<SessionStateView> = {}): SessionStateView {
  return {
    session_id: "s1",
    phase: "searching",
    frame: "speaker",
    seed: 0,
    episode_count: 0,
    arena: arenaFixture(),
    agent: {
      pose: { x: 85, y: 50, heading: Math.PI },
      visited: [0],
      steps: 1,
      station_index: 0,
    },
    utterance: { text: "the big one", tokens: ["the", "big", "one"] },
    seen: [
      { object_id: 1, x: [0.2, 0.1, 0, 0.2, 0.1, 0.3] },
      { object_id: 2, x: [0.4, 0.6, 1, 0.5, -0.2, 0.4] },
    ],
    distribution: [
      { object_id: 1, raw: 0.4, normalized: 0.55 },
      { object_id: 2, raw: 0.3, normalized: 0.45 },
    ],
    commit: null,
    ledger_tail: [],
    ...overrides,
  };
}
