/**
 * 2D rendering of a session: vessel cross-section (side view) and the
 * actuator ring (top view). Drawn against a minimal canvas-like context so
 * it runs in a browser canvas or a test stub alike.
 */

import type { SessionView } from "./session-view.js";

export interface CanvasLike {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

export interface RenderOptions {
  width: number;
  height: number;
  margin?: number;
}

export function render(ctx: CanvasLike, view: SessionView, opts: RenderOptions): void {
  const { width, height } = opts;
  const margin = opts.margin ?? 20;
  ctx.clearRect(0, 0, width, height);
  const snap = view.snapshot;
  if (!snap) return;

  const half = width / 2;
  drawSideView(ctx, view, { x0: margin, y0: margin, w: half - 2 * margin, h: height - 2 * margin });
  drawTopView(ctx, view, {
    cx: half + (half - margin) / 2,
    cy: height / 2,
    r: Math.min(half, height) / 2 - margin,
  });
}

function drawSideView(
  ctx: CanvasLike,
  view: SessionView,
  box: { x0: number; y0: number; w: number; h: number }
): void {
  const snap = view.snapshot!;
  const maxR = Math.max(...snap.profile.map(([, r]) => r));
  const sx = (r: number) => (r / maxR) * (box.w / 2);
  const sy = (z: number) => box.y0 + box.h - (z / snap.height) * box.h;
  const cx = box.x0 + box.w / 2;

  ctx.strokeStyle = "#444";
  ctx.lineWidth = 2;
  ctx.beginPath();
  // left wall bottom-to-top, then across the rim, then down the right wall
  for (const [z, r] of snap.profile) ctx.lineTo(cx - sx(r), sy(z));
  for (const [z, r] of [...snap.profile].reverse()) ctx.lineTo(cx + sx(r), sy(z));
  ctx.lineTo(cx - sx(snap.profile[0][1]), sy(snap.profile[0][0]));
  ctx.stroke();

  if (view.cog) {
    ctx.fillStyle = "#2a7";
    ctx.beginPath();
    ctx.arc(cx + sx(view.cog[0]), sy(view.cog[2]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawTopView(
  ctx: CanvasLike,
  view: SessionView,
  ring: { cx: number; cy: number; r: number }
): void {
  const snap = view.snapshot!;
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.arc(ring.cx, ring.cy, ring.r, 0, 2 * Math.PI);
  ctx.stroke();

  const n = snap.motor_count;
  for (let k = 0; k < n; k++) {
    const az = (2 * Math.PI * k) / n;
    const x = ring.cx + ring.r * Math.cos(az);
    const y = ring.cy - ring.r * Math.sin(az);
    ctx.fillStyle = view.isActive(k) ? "#fff" : "#666";
    ctx.beginPath();
    ctx.arc(x, y, view.isActive(k) ? 9 : 5, 0, 2 * Math.PI);
    ctx.fill();
    if (view.isActive(k)) {
      ctx.strokeStyle = "#fa0";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, 12, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  if (view.cog && snap.profile.length > 0) {
    const maxR = Math.max(...snap.profile.map(([, r]) => r));
    const scale = ring.r / maxR;
    ctx.fillStyle = "#2a7";
    ctx.beginPath();
    ctx.arc(ring.cx + view.cog[0] * scale, ring.cy - view.cog[1] * scale, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

/** One-line text rendering of the ring, for terminal use. */
export function ringText(view: SessionView): string {
  const n = view.motorCount;
  const cells: string[] = [];
  for (let k = 0; k < n; k++) cells.push(view.isActive(k) ? "O" : ".");
  return cells.join(" ");
}
