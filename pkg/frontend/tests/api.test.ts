import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, ConflictError, NetworkError, liveApi } from "../src/api.js";

function jsonResponse(status: number, body: unknown) {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as Response;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("liveApi", () => {
  it("fetches the queue with pagination params", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, { total: 0, offset: 5, limit: 10, items: [] }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const page = await liveApi.fetchQueue(5, 10);
    expect(page.offset).toBe(5);
    expect(fetchMock).toHaveBeenCalledWith("/api/queue?offset=5&limit=10", undefined);
  });

  it("posts verdicts as JSON", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, { clip_id: "c/1", record: {} }),
    );
    vi.stubGlobal("fetch", fetchMock);
    await liveApi.submitVerdict("c/1", "N", "rae");
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/clips/c%2F1/verdict");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({ label: "N", reviewer: "rae" });
  });

  it("turns 409 into ConflictError carrying the record", async () => {
    const record = { clip_id: "c", human_label: "A" };
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse(409, { detail: { message: "clip already verdicted", record } }),
      ),
    );
    const err = await liveApi.submitVerdict("c", "N", "r").catch((e) => e);
    expect(err).toBeInstanceOf(ConflictError);
    expect((err as ConflictError).status).toBe(409);
    expect((err as ConflictError).record).toEqual(record);
  });

  it("turns other failures into ApiError with status and detail", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(422, { detail: "unknown style label" })),
    );
    const err = await liveApi.submitVerdict("c", "N", "r").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err).not.toBeInstanceOf(ConflictError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).message).toContain("unknown style label");
  });

  it("survives non-JSON error bodies", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 500,
        json: async () => {
          throw new SyntaxError("not json");
        },
      })),
    );
    const err = await liveApi.fetchStats().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).message).toContain("500");
  });

  it("wraps transport failures in NetworkError", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("Failed to fetch");
      }),
    );
    const err = await liveApi.fetchQueue().catch((e) => e);
    expect(err).toBeInstanceOf(NetworkError);
    expect(err).not.toBeInstanceOf(ApiError);
  });
});
