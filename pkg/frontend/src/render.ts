import { isBlocked } from "./protocol.js";
import type { ViewState } from "./state.js";

// Rendering happens in two stages: buildScene() turns the view state into
// a flat list of draw operations in screen coordinates (pure, and what
// the golden test pins down), drawScene() replays them on a canvas.

export type SceneOp =
  | { op: "clear"; w: number; h: number }
  | { op: "cell"; x: number; y: number; w: number; h: number; color: string }
  | { op: "marker"; x: number; y: number; size: number; color: string }
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; color: string; alpha: number }
  | { op: "disc"; x: number; y: number; r: number; color: string }
  | { op: "avatar"; x: number; y: number; r: number; inWall: boolean }
  | { op: "banner"; text: string; color: string };

export const EDGE_COLORS: Record<string, string> = {
  proximity: "#1f77b4",
  trajectory: "#d62728",
};
export const NODE_COLOR = "#2c2c2c";
export const WAYPOINT_COLOR = "#2ca02c";
export const WALL_COLOR = "#555555";
export const WARN_COLOR = "#cc3300";

const AVATAR_RADIUS_PX = 6;
const DISC_BASE_PX = 2.5;
const DISC_LOG_SCALE = 1.1;

/** Disc radius grows with the log of the node's accumulated error. */
export function nodeRadius(error: number): number {
  return round2(DISC_BASE_PX + DISC_LOG_SCALE * Math.log1p(Math.max(0, error)));
}

/** Older edges fade out; the default edge lifetime is 75 inputs. */
export function edgeAlpha(age: number, maxAge: number): number {
  return round2(Math.max(0.25, 1 - age / (maxAge + 1)));
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function buildScene(view: ViewState, widthPx: number, heightPx: number): SceneOp[] {
  const ops: SceneOp[] = [{ op: "clear", w: widthPx, h: heightPx }];
  const grid = view.map;
  if (!grid) return ops;

  // world y grows upward, canvas y grows downward
  const scale = Math.min(widthPx / grid.widthWu, heightPx / grid.heightWu);
  const sx = (x: number) => round2(x * scale);
  const sy = (y: number) => round2(heightPx - y * scale);

  const cellPx = round2(grid.cellSize * scale);
  grid.rows.forEach((row, r) => {
    for (let c = 0; c < grid.cols; c++) {
      if (row[c] === "#") {
        ops.push({
          op: "cell",
          x: sx(c * grid.cellSize),
          y: sy((r + 1) * grid.cellSize),
          w: cellPx,
          h: cellPx,
          color: WALL_COLOR,
        });
      }
    }
  });
  for (const wp of grid.waypoints) {
    ops.push({ op: "marker", x: sx(wp.x), y: sy(wp.y), size: 4, color: WAYPOINT_COLOR });
  }

  const snapshot = view.snapshot;
  if (snapshot) {
    const maxAge = Number(view.params.max_age ?? 75);
    const positions = new Map<number, [number, number]>();
    for (const [id, x, y] of snapshot.nodes) {
      positions.set(id, [x, y]);
    }
    for (const [a, b, kind, age] of snapshot.edges) {
      if (view.overlay !== "both" && kind !== view.overlay) continue;
      const pa = positions.get(a);
      const pb = positions.get(b);
      if (!pa || !pb) continue;
      ops.push({
        op: "line",
        x1: sx(pa[0]),
        y1: sy(pa[1]),
        x2: sx(pb[0]),
        y2: sy(pb[1]),
        color: EDGE_COLORS[kind] ?? NODE_COLOR,
        alpha: edgeAlpha(age, maxAge),
      });
    }
    for (const [, x, y, error] of snapshot.nodes) {
      ops.push({ op: "disc", x: sx(x), y: sy(y), r: nodeRadius(error), color: NODE_COLOR });
    }
  }

  const inWall = isBlocked(grid, view.avatar.x, view.avatar.y);
  ops.push({
    op: "avatar",
    x: sx(view.avatar.x),
    y: sy(view.avatar.y),
    r: AVATAR_RADIUS_PX,
    inWall,
  });
  if (inWall) {
    // walls never block movement; they flag it
    ops.push({ op: "banner", text: "inside a wall", color: WARN_COLOR });
  }
  return ops;
}

export function drawScene(ctx: CanvasRenderingContext2D, ops: SceneOp[]): void {
  for (const item of ops) {
    switch (item.op) {
      case "clear":
        ctx.clearRect(0, 0, item.w, item.h);
        ctx.fillStyle = "#f4f1ea";
        ctx.fillRect(0, 0, item.w, item.h);
        break;
      case "cell":
        ctx.fillStyle = item.color;
        ctx.fillRect(item.x, item.y, item.w, item.h);
        break;
      case "marker":
        ctx.strokeStyle = item.color;
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.moveTo(item.x - item.size, item.y);
        ctx.lineTo(item.x + item.size, item.y);
        ctx.moveTo(item.x, item.y - item.size);
        ctx.lineTo(item.x, item.y + item.size);
        ctx.stroke();
        break;
      case "line":
        ctx.globalAlpha = item.alpha;
        ctx.strokeStyle = item.color;
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.moveTo(item.x1, item.y1);
        ctx.lineTo(item.x2, item.y2);
        ctx.stroke();
        ctx.globalAlpha = 1;
        break;
      case "disc":
        ctx.fillStyle = item.color;
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "avatar":
        ctx.fillStyle = item.inWall ? WARN_COLOR : "#ff9900";
        ctx.strokeStyle = "#000000";
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.r, 0, 2 * Math.PI);
        ctx.fill();
        ctx.stroke();
        break;
      case "banner":
        ctx.fillStyle = item.color;
        ctx.font = "14px sans-serif";
        ctx.fillText(item.text, 10, 20);
        break;
    }
  }
}
