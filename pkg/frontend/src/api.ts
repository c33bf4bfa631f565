/** Thin typed client for the review service JSON API. */

import type {
  ClipDetail,
  Label,
  LabelRecord,
  QueuePage,
  Stats,
  VerdictResponse,
} from "./types.js";

/** Non-2xx response with whatever detail the service attached. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** 409: the clip already carries a verdict; the current record rides along. */
export class ConflictError extends ApiError {
  constructor(
    message: string,
    readonly record: LabelRecord | null,
  ) {
    super(409, message, record);
    this.name = "ConflictError";
  }
}

/** fetch itself failed: offline, DNS, aborted — nothing reached the service. */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(path, init);
  } catch (err) {
    throw new NetworkError(err instanceof Error ? err.message : String(err));
  }
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let detail: unknown = null;
  try {
    detail = ((await resp.json()) as { detail?: unknown }).detail ?? null;
  } catch {
    // non-JSON error body; keep detail null
  }
  if (resp.status === 409) {
    const doc = detail as { message?: string; record?: LabelRecord } | null;
    throw new ConflictError(doc?.message ?? "already verdicted", doc?.record ?? null);
  }
  const message =
    typeof detail === "string" ? detail : `request failed with status ${resp.status}`;
  throw new ApiError(resp.status, message, detail);
}

export interface ApiClient {
  fetchQueue(offset?: number, limit?: number): Promise<QueuePage>;
  fetchClip(clipId: string): Promise<ClipDetail>;
  submitVerdict(clipId: string, label: Label, reviewer: string): Promise<VerdictResponse>;
  fetchStats(): Promise<Stats>;
}

export const liveApi: ApiClient = {
  fetchQueue(offset = 0, limit = 100) {
    return request<QueuePage>(`/api/queue?offset=${offset}&limit=${limit}`);
  },
  fetchClip(clipId) {
    return request<ClipDetail>(`/api/clips/${encodeURIComponent(clipId)}`);
  },
  submitVerdict(clipId, label, reviewer) {
    return request<VerdictResponse>(
      `/api/clips/${encodeURIComponent(clipId)}/verdict`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ label, reviewer }),
      },
    );
  },
  fetchStats() {
    return request<Stats>("/api/stats");
  },
};
