import { describe, expect, it } from "vitest";

import {
  canSubmit,
  clampCursor,
  initialState,
  nextClipId,
  verdictFromKey,
} from "../src/state.js";
import type { QueueItem } from "../src/types.js";

function item(id: string): QueueItem {
  return {
    clip_id: id,
    severity: 1,
    reasons: ["disagreement"],
    rule_label: "N",
    external_label: "A",
    fused_label: "A",
    final_label: "A",
  };
}

describe("clampCursor", () => {
  it("stays within [0, n-1]", () => {
    expect(clampCursor(-5, 10)).toBe(0);
    expect(clampCursor(0, 10)).toBe(0);
    expect(clampCursor(9, 10)).toBe(9);
    expect(clampCursor(99, 10)).toBe(9);
  });

  it("rounds fractional positions", () => {
    expect(clampCursor(4.4, 10)).toBe(4);
    expect(clampCursor(4.6, 10)).toBe(5);
  });

  it("handles empty clips", () => {
    expect(clampCursor(3, 0)).toBe(0);
  });
});

describe("canSubmit", () => {
  it("needs a clip, a verdict, and no in-flight request", () => {
    const state = initialState();
    expect(canSubmit(state)).toBe(false);
    state.selectedId = "c";
    expect(canSubmit(state)).toBe(false);
    state.pendingVerdict = "N";
    expect(canSubmit(state)).toBe(true);
    state.submitting = true;
    expect(canSubmit(state)).toBe(false);
  });
});

describe("nextClipId", () => {
  it("returns the first entry not equal to the finished clip", () => {
    const queue = [item("a"), item("b"), item("c")];
    expect(nextClipId(queue, null)).toBe("a");
    expect(nextClipId(queue, "a")).toBe("b");
    expect(nextClipId(queue, "x")).toBe("a");
  });

  it("returns null when nothing is left", () => {
    expect(nextClipId([], null)).toBeNull();
    expect(nextClipId([item("a")], "a")).toBeNull();
  });
});

describe("verdictFromKey", () => {
  it("maps a/n/c in either case and rejects the rest", () => {
    expect(verdictFromKey("a")).toBe("A");
    expect(verdictFromKey("N")).toBe("N");
    expect(verdictFromKey("c")).toBe("C");
    expect(verdictFromKey("x")).toBeNull();
    expect(verdictFromKey("Enter")).toBeNull();
  });
});
