/** Top-down scene rendering in ego-start-centered coordinates. */

import type { ClipDisplay } from "./types.js";

export interface Transform {
  scale: number; // meters to pixels, shared by both axes
  cx: number; // world-space center mapped to the canvas center
  cy: number;
  width: number;
  height: number;
}

export type Point = [number, number];

/**
 * Fit every drawable point into the canvas with a fixed aspect ratio:
 * one scale for both axes, centered on the points' bounding box.
 */
export function computeTransform(
  points: Point[],
  width: number,
  height: number,
  margin = 24,
): Transform {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  if (!Number.isFinite(minX)) {
    return { scale: 1, cx: 0, cy: 0, width, height };
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const scale = Math.min(
    (width - 2 * margin) / spanX,
    (height - 2 * margin) / spanY,
  );
  return {
    scale,
    cx: (minX + maxX) / 2,
    cy: (minY + maxY) / 2,
    width,
    height,
  };
}

/** World point to pixel coordinates; y points up on screen. */
export function project(t: Transform, x: number, y: number): Point {
  return [
    t.width / 2 + (x - t.cx) * t.scale,
    t.height / 2 - (y - t.cy) * t.scale,
  ];
}

/** Speed-graded polyline color: slow is blue, fast is red. */
export function speedColor(v: number, vMin: number, vMax: number): string {
  const span = vMax - vMin;
  const f = span > 1e-9 ? (v - vMin) / span : 0.5;
  const hue = 220 - 220 * Math.min(Math.max(f, 0), 1);
  return `hsl(${Math.round(hue)}, 85%, 55%)`;
}

/**
 * Map the ego playback cursor onto another (possibly differently
 * downsampled) path of `pathLen` points.
 */
export function frameIndex(cursor: number, egoLen: number, pathLen: number): number {
  if (pathLen <= 1) {
    return 0;
  }
  const f = egoLen > 1 ? cursor / (egoLen - 1) : 0;
  return Math.min(Math.round(f * (pathLen - 1)), pathLen - 1);
}

/** The subset of CanvasRenderingContext2D the renderer touches. */
export interface SceneCanvas {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
}

const AGENT_COLORS: Record<string, string> = {
  vehicle: "#f2a33c",
  pedestrian: "#e8e34f",
  cyclist: "#7fe87a",
};

function shifted(path: Point[], origin: Point): Point[] {
  return path.map(([x, y]) => [x - origin[0], y - origin[1]]);
}

/**
 * Draw corridor, agent tracks, the speed-graded ego polyline, and the
 * per-frame markers for the cursor position.
 */
export function drawScene(
  ctx: SceneCanvas,
  display: ClipDisplay,
  cursor: number,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (display.path.length === 0) {
    return;
  }
  const origin = display.path[0];
  const ego = shifted(display.path, origin);
  const agents = display.agents.map((a) => shifted(a.path, origin));
  const corridor = display.corridor ? shifted(display.corridor, origin) : null;

  const everything: Point[] = [
    ...ego,
    ...agents.flat(),
    ...(corridor ?? []),
  ];
  const t = computeTransform(everything, width, height);

  if (corridor && corridor.length >= 3) {
    ctx.beginPath();
    corridor.forEach(([x, y], i) => {
      const [px, py] = project(t, x, y);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.globalAlpha = 0.12;
    ctx.fillStyle = "#5b8def";
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.strokeStyle = "#3c5a99";
    ctx.lineWidth = 1;
    ctx.stroke();
  }

  agents.forEach((path, i) => {
    if (path.length === 0) {
      return;
    }
    ctx.globalAlpha = 0.35;
    ctx.strokeStyle = AGENT_COLORS[display.agents[i].kind] ?? "#bbbbbb";
    ctx.lineWidth = 1;
    ctx.beginPath();
    path.forEach(([x, y], j) => {
      const [px, py] = project(t, x, y);
      j === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.globalAlpha = 1;
  });

  const vMin = Math.min(...display.speeds);
  const vMax = Math.max(...display.speeds);
  ctx.lineWidth = 2.5;
  for (let i = 1; i < ego.length; i++) {
    ctx.strokeStyle = speedColor(display.speeds[i] ?? vMin, vMin, vMax);
    ctx.beginPath();
    const [ax, ay] = project(t, ego[i - 1][0], ego[i - 1][1]);
    const [bx, by] = project(t, ego[i][0], ego[i][1]);
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
  }

  // one marker per agent at the cursor frame
  agents.forEach((path, i) => {
    if (path.length === 0) {
      return;
    }
    const idx = frameIndex(cursor, ego.length, path.length);
    const [px, py] = project(t, path[idx][0], path[idx][1]);
    ctx.fillStyle = AGENT_COLORS[display.agents[i].kind] ?? "#bbbbbb";
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, Math.PI * 2);
    ctx.fill();
  });

  const egoIdx = frameIndex(cursor, ego.length, ego.length);
  const [ex, ey] = project(t, ego[egoIdx][0], ego[egoIdx][1]);
  ctx.fillStyle = "#ffffff";
  ctx.beginPath();
  ctx.arc(ex, ey, 6, 0, Math.PI * 2);
  ctx.fill();
  ctx.strokeStyle = "#111111";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(ex, ey, 6, 0, Math.PI * 2);
  ctx.stroke();
}
