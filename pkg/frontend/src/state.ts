/** Pure view-state helpers; all DOM-free so they unit test directly. */

import type { Label, QueueItem } from "./types.js";

export interface ViewState {
  queue: QueueItem[];
  queueTotal: number;
  selectedId: string | null;
  cursor: number;
  nSamples: number;
  pendingVerdict: Label | null;
  submitting: boolean;
}

export function initialState(): ViewState {
  return {
    queue: [],
    queueTotal: 0,
    selectedId: null,
    cursor: 0,
    nSamples: 0,
    pendingVerdict: null,
    submitting: false,
  };
}

/** Playback cursor stays inside [0, sampleCount - 1]. */
export function clampCursor(cursor: number, sampleCount: number): number {
  if (sampleCount <= 0) {
    return 0;
  }
  return Math.min(Math.max(Math.round(cursor), 0), sampleCount - 1);
}

/** Submit needs a selected clip and verdict, and no request in flight. */
export function canSubmit(state: ViewState): boolean {
  return (
    state.selectedId !== null && state.pendingVerdict !== null && !state.submitting
  );
}

/** The clip to advance to once `afterId` leaves the queue. */
export function nextClipId(queue: QueueItem[], afterId: string | null): string | null {
  for (const item of queue) {
    if (item.clip_id !== afterId) {
      return item.clip_id;
    }
  }
  return null;
}

export function verdictFromKey(key: string): Label | null {
  switch (key.toLowerCase()) {
    case "a":
      return "A";
    case "n":
      return "N";
    case "c":
      return "C";
    default:
      return null;
  }
}
