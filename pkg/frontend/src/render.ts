/** Top-down arena rendering.
 *
 * Scene building is pure (state → primitive list) so tests can assert what
 * gets drawn; `drawScene` is the only code that touches a canvas context.
 * The human teacher sees the whole table, so objects the agent has not yet
 * perceived are drawn as neutral silhouettes at their true positions.
 */

import type { DistributionEntry, SessionStateView } from "./types.js";

export const CONE_HALF_ANGLE = Math.PI / 3; // matches the simulator's 120° cone

export type Primitive =
  | { kind: "table"; x: number; y: number; w: number; h: number }
  | { kind: "station"; x: number; y: number; visited: boolean }
  | { kind: "speaker"; x: number; y: number; heading: number }
  | { kind: "cone"; x: number; y: number; heading: number; range: number; halfAngle: number }
  | { kind: "agent"; x: number; y: number; heading: number }
  | {
      kind: "object" | "silhouette";
      objectId: number;
      x: number;
      y: number;
      radius: number;
      shape: string;
      albedo: number;
      committed: boolean;
    };

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
  worldHeight: number;
}

export function viewport(bounds: [number, number], width: number, height: number, margin = 20): Viewport {
  const scale = Math.min((width - 2 * margin) / bounds[0], (height - 2 * margin) / bounds[1]);
  return {
    scale,
    offsetX: (width - bounds[0] * scale) / 2,
    offsetY: (height - bounds[1] * scale) / 2,
    worldHeight: bounds[1],
  };
}

export function toCanvas(vp: Viewport, x: number, y: number): [number, number] {
  // world y grows upward, canvas y grows downward
  return [vp.offsetX + x * vp.scale, vp.offsetY + (vp.worldHeight - y) * vp.scale];
}

export function buildScene(state: SessionStateView): Primitive[] {
  const arena = state.arena;
  const prims: Primitive[] = [
    { kind: "table", x: 0, y: 0, w: arena.bounds[0], h: arena.bounds[1] },
  ];
  const visited = new Set(state.agent?.visited ?? []);
  arena.stations.forEach((pose, i) => {
    prims.push({ kind: "station", x: pose.x, y: pose.y, visited: visited.has(i) });
  });
  prims.push({
    kind: "speaker",
    x: arena.speaker_pose.x,
    y: arena.speaker_pose.y,
    heading: arena.speaker_pose.heading,
  });

  const seenIds = new Set(state.seen.map((entry) => entry.object_id));
  const committedId = state.commit?.object_id ?? null;
  for (const obj of arena.objects) {
    prims.push({
      kind: seenIds.has(obj.object_id) ? "object" : "silhouette",
      objectId: obj.object_id,
      x: obj.position[0],
      y: obj.position[1],
      radius: Math.sqrt(obj.footprint_area / Math.PI),
      shape: obj.shape,
      albedo: obj.albedo,
      committed: obj.object_id === committedId,
    });
  }

  if (state.agent !== null) {
    const pose = state.agent.pose;
    prims.push({
      kind: "cone",
      x: pose.x,
      y: pose.y,
      heading: pose.heading,
      range: arena.view_range,
      halfAngle: CONE_HALF_ANGLE,
    });
    prims.push({ kind: "agent", x: pose.x, y: pose.y, heading: pose.heading });
  }
  return prims;
}

export interface Bar {
  objectId: number;
  raw: number;
  normalized: number;
  committed: boolean;
}

/** Distribution bars; normalized values must sum to 1 within epsilon. */
export function distributionBars(state: SessionStateView, epsilon = 1e-9): Bar[] {
  const entries: DistributionEntry[] = state.distribution;
  if (entries.length === 0) return [];
  const total = entries.reduce((acc, entry) => acc + entry.normalized, 0);
  if (Math.abs(total - 1) > epsilon) {
    throw new Error(`distribution does not sum to 1: ${total}`);
  }
  const committedId = state.commit?.object_id ?? null;
  return entries.map((entry) => ({
    objectId: entry.object_id,
    raw: entry.raw,
    normalized: entry.normalized,
    committed: entry.object_id === committedId,
  }));
}

const SILHOUETTE_FILL = "#d8d8d8";
const TABLE_FILL = "#f7f3ea";

export function drawScene(
  ctx: CanvasRenderingContext2D,
  state: SessionStateView,
  width: number,
  height: number,
): void {
  const vp = viewport(state.arena.bounds, width, height);
  ctx.clearRect(0, 0, width, height);
  for (const prim of buildScene(state)) {
    switch (prim.kind) {
      case "table": {
        const [x, y] = toCanvas(vp, prim.x, prim.y + prim.h);
        ctx.fillStyle = TABLE_FILL;
        ctx.strokeStyle = "#8a7f64";
        ctx.fillRect(x, y, prim.w * vp.scale, prim.h * vp.scale);
        ctx.strokeRect(x, y, prim.w * vp.scale, prim.h * vp.scale);
        break;
      }
      case "station": {
        const [x, y] = toCanvas(vp, prim.x, prim.y);
        ctx.beginPath();
        ctx.arc(x, y, 3, 0, 2 * Math.PI);
        ctx.fillStyle = prim.visited ? "#4a90d9" : "#c0c0c0";
        ctx.fill();
        break;
      }
      case "speaker": {
        const [x, y] = toCanvas(vp, prim.x, prim.y);
        ctx.beginPath();
        ctx.arc(x, y, 6, 0, 2 * Math.PI);
        ctx.fillStyle = "#7b4ad9";
        ctx.fill();
        break;
      }
      case "cone": {
        const [x, y] = toCanvas(vp, prim.x, prim.y);
        const r = prim.range * vp.scale;
        // canvas angles are clockwise; world angles counter-clockwise
        const a0 = -(prim.heading + prim.halfAngle);
        const a1 = -(prim.heading - prim.halfAngle);
        ctx.beginPath();
        ctx.moveTo(x, y);
        ctx.arc(x, y, r, a0, a1);
        ctx.closePath();
        ctx.fillStyle = "rgba(74, 144, 217, 0.15)";
        ctx.fill();
        break;
      }
      case "agent": {
        const [x, y] = toCanvas(vp, prim.x, prim.y);
        ctx.beginPath();
        ctx.arc(x, y, 6, 0, 2 * Math.PI);
        ctx.fillStyle = "#2f9e44";
        ctx.fill();
        ctx.beginPath();
        ctx.moveTo(x, y);
        ctx.lineTo(x + 12 * Math.cos(prim.heading), y - 12 * Math.sin(prim.heading));
        ctx.strokeStyle = "#2f9e44";
        ctx.stroke();
        break;
      }
      case "object":
      case "silhouette": {
        const [x, y] = toCanvas(vp, prim.x, prim.y);
        const r = Math.max(3, prim.radius * vp.scale);
        ctx.beginPath();
        if (prim.shape === "ball" || prim.kind === "silhouette") {
          ctx.arc(x, y, r, 0, 2 * Math.PI);
        } else {
          ctx.rect(x - r, y - r, 2 * r, 2 * r);
        }
        if (prim.kind === "silhouette") {
          ctx.fillStyle = SILHOUETTE_FILL;
        } else {
          const shade = Math.round(40 + prim.albedo * 180);
          ctx.fillStyle = `rgb(${shade}, ${shade}, ${shade})`;
        }
        ctx.fill();
        ctx.strokeStyle = prim.committed ? "#e8590c" : "#555";
        ctx.lineWidth = prim.committed ? 3 : 1;
        ctx.stroke();
        ctx.lineWidth = 1;
        if (prim.kind === "object") {
          ctx.fillStyle = "#111";
          ctx.font = "10px sans-serif";
          ctx.fillText(String(prim.objectId), x + r + 2, y);
        }
        break;
      }
    }
  }
}
