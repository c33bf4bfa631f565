/** Small display formatters shared by the panels. */

import type { Label } from "./types.js";

const LABEL_NAMES: Record<Label, string> = {
  A: "Aggressive",
  N: "Normal",
  C: "Conservative",
};

export function labelName(label: Label): string {
  return LABEL_NAMES[label];
}

export function num(value: number | null | undefined, digits = 2): string {
  if (value === null || value === undefined || !Number.isFinite(value)) {
    return "–";
  }
  return value.toFixed(digits);
}

/** Agreement and ratio displays are fixed to one decimal place. */
export function pct(fraction: number | null): string {
  if (fraction === null || !Number.isFinite(fraction)) {
    return "–";
  }
  return `${(fraction * 100).toFixed(1)}%`;
}

export function severityClass(severity: number): string {
  return `sev-${Math.min(Math.max(severity, 0), 3)}`;
}

const TREND_NAMES: Record<string, string> = {
  Accelerating: "accelerating",
  Decelerating: "decelerating",
  AccelThenDecel: "accel, then decel",
  DecelThenAccel: "decel, then accel",
  QuasiConstant: "steady",
};

export function trendName(trend: string): string {
  return TREND_NAMES[trend] ?? trend;
}
