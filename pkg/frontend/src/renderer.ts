/**
 * Top-down arena renderer: bounds, rotated obstacle rectangles, goal discs
 * color-matched to UAVs, oriented UAV triangles, optional ray overlay with
 * hit-tag coloring.  Scale fits the arena to the viewport.
 */

import { StateFrame, UavPose } from "./protocol.js";

export interface Transform {
  scale: number;
  toX(wx: number): number;
  toY(wy: number): number;
}

const MARGIN = 12;

export const UAV_COLORS = ["#2563eb", "#9333ea", "#ca8a04", "#dc2626",
  "#059669", "#db2777"];

export const TAG_COLORS: Record<number, string> = {
  0: "#111111", // Obstacle
  1: "#f59e0b", // Goal (peer)
  2: "#16a34a", // OwnGoal
  3: "#9333ea", // UAV
  4: "#64748b", // Wall
};
export const MISS_COLOR = "#d4d4d8";

/** World -> canvas transform fitting the arena with a margin; +y up. */
export function makeTransform(
  arena: [number, number, number, number],
  width: number,
  height: number,
): Transform {
  const [x0, x1, y0, y1] = arena;
  const scale = Math.min(
    (width - 2 * MARGIN) / (x1 - x0),
    (height - 2 * MARGIN) / (y1 - y0),
  );
  const cx = (x0 + x1) / 2;
  const cy = (y0 + y1) / 2;
  return {
    scale,
    toX: (wx) => width / 2 + (wx - cx) * scale,
    toY: (wy) => height / 2 - (wy - cy) * scale,
  };
}

/** Triangle vertices (canvas coords) for a UAV pose, apex along heading. */
export function uavTriangle(
  u: UavPose,
  t: Transform,
  size = 0.45,
): Array<[number, number]> {
  const rad = (u.heading * Math.PI) / 180;
  const apex: [number, number] = [
    u.x + size * Math.cos(rad),
    u.y + size * Math.sin(rad),
  ];
  const baseAngleL = rad + (Math.PI * 5) / 6;
  const baseAngleR = rad - (Math.PI * 5) / 6;
  const left: [number, number] = [
    u.x + size * 0.8 * Math.cos(baseAngleL),
    u.y + size * 0.8 * Math.sin(baseAngleL),
  ];
  const right: [number, number] = [
    u.x + size * 0.8 * Math.cos(baseAngleR),
    u.y + size * 0.8 * Math.sin(baseAngleR),
  ];
  return [apex, left, right].map(([wx, wy]) => [t.toX(wx), t.toY(wy)]);
}

export interface RenderOptions {
  showRays: boolean;
}

export function renderArena(
  ctx: CanvasRenderingContext2D,
  frame: StateFrame,
  width: number,
  height: number,
  opts: RenderOptions = { showRays: true },
): Transform {
  const t = makeTransform(frame.arena, width, height);
  ctx.clearRect(0, 0, width, height);

  // arena bounds
  const [x0, x1, y0, y1] = frame.arena;
  ctx.strokeStyle = "#334155";
  ctx.lineWidth = 2;
  ctx.strokeRect(
    t.toX(x0),
    t.toY(y1),
    (x1 - x0) * t.scale,
    (y1 - y0) * t.scale,
  );

  // ray overlay under everything else
  if (opts.showRays) {
    for (const [aid, rays] of Object.entries(frame.rays)) {
      const uav = frame.uavs.find((u) => u.id === Number(aid));
      if (!uav) continue;
      drawRays(ctx, t, uav, rays as StateFrame["rays"][string]);
    }
  }

  // obstacles: rotated rectangles
  ctx.fillStyle = "#111111";
  for (const ob of frame.obstacles) {
    ctx.save();
    ctx.translate(t.toX(ob.cx), t.toY(ob.cy));
    ctx.rotate((-ob.rot * Math.PI) / 180); // canvas y is flipped
    ctx.fillRect(
      -ob.hl * t.scale,
      -ob.hw * t.scale,
      2 * ob.hl * t.scale,
      2 * ob.hw * t.scale,
    );
    ctx.restore();
  }

  // goals: discs color-matched to their owners
  for (const g of frame.goals) {
    ctx.strokeStyle = UAV_COLORS[g.owner % UAV_COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(t.toX(g.x), t.toY(g.y), 0.5 * t.scale, 0, 2 * Math.PI);
    ctx.stroke();
  }

  // UAVs: oriented triangles
  for (const u of frame.uavs) {
    if (!u.alive) continue;
    const tri = uavTriangle(u, t);
    ctx.fillStyle = UAV_COLORS[u.id % UAV_COLORS.length];
    ctx.beginPath();
    ctx.moveTo(tri[0][0], tri[0][1]);
    ctx.lineTo(tri[1][0], tri[1][1]);
    ctx.lineTo(tri[2][0], tri[2][1]);
    ctx.closePath();
    ctx.fill();
  }
  return t;
}

function drawRays(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  uav: UavPose,
  rays: StateFrame["rays"][string],
): void {
  // offsets mirror the sensor fan: evenly spaced across the arc, but the
  // client never recomputes geometry, it only draws server distances along
  // the known fan directions
  const n = rays.length;
  const arc = 180;
  ctx.lineWidth = 1;
  for (let k = 0; k < n; k++) {
    const [hit, dist, tag] = rays[k];
    const off = n === 1 ? 0 : -arc / 2 + (arc * k) / (n - 1);
    const rad = ((uav.heading + off) * Math.PI) / 180;
    const ex = uav.x + dist * Math.cos(rad);
    const ey = uav.y + dist * Math.sin(rad);
    ctx.strokeStyle = hit ? TAG_COLORS[tag] ?? MISS_COLOR : MISS_COLOR;
    ctx.globalAlpha = hit ? 0.8 : 0.25;
    ctx.beginPath();
    ctx.moveTo(t.toX(uav.x), t.toY(uav.y));
    ctx.lineTo(t.toX(ex), t.toY(ey));
    ctx.stroke();
  }
  ctx.globalAlpha = 1.0;
}
