/** Wire types mirroring the session service payloads. */

export type Phase = "awaiting_utterance" | "searching" | "awaiting_feedback" | "done";

export interface PoseView {
  x: number;
  y: number;
  heading: number;
}

export interface ObjectView {
  object_id: number;
  shape: string;
  footprint_area: number;
  major_axis: number;
  minor_axis: number;
  corner_count: number;
  albedo: number;
  position: [number, number];
}

export interface ArenaSnapshot {
  bounds: [number, number];
  rng_seed: number;
  view_range: number;
  noise_sigma: number;
  speaker_pose: PoseView;
  start_pose: PoseView;
  stations: PoseView[];
  objects: ObjectView[];
}

export interface DistributionEntry {
  object_id: number;
  raw: number;
  normalized: number;
}

export interface SeenEntry {
  object_id: number;
  x: number[];
}

export interface AgentView {
  pose: PoseView;
  visited: number[];
  steps: number;
  station_index: number | null;
}

export interface CommitView {
  object_id: number;
  confidence: number;
  raw: number;
  early: boolean;
}

export interface SessionStateView {
  session_id: string;
  phase: Phase;
  frame: "speaker" | "agent";
  seed: number;
  episode_count: number;
  arena: ArenaSnapshot;
  agent: AgentView | null;
  utterance: { text: string; tokens: string[] } | null;
  seen: SeenEntry[];
  distribution: DistributionEntry[];
  commit: CommitView | null;
  ledger_tail: Record<string, unknown>[];
}

export interface StepResponse {
  phase: Phase;
  station: number | null;
  percept: SeenEntry[] | null;
  distribution: DistributionEntry[];
  resolution: "committed" | "undecided";
  commit: CommitView | null;
}

export interface FeedbackResponse {
  phase: Phase;
  deltas: Record<string, [number, number]>;
}

export interface LexiconWordView {
  token: string;
  feature_names: string[];
  weights: number[];
  bias: number;
  pos_count: number;
  neg_count: number;
}

export interface LexiconIndexEntry {
  token: string;
  pos_count: number;
  neg_count: number;
}
