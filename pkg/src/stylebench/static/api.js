/** Thin typed client for the review service JSON API. */
/** Non-2xx response with whatever detail the service attached. */
export class ApiError extends Error {
    constructor(status, message, detail = null) {
        super(message);
        this.status = status;
        this.detail = detail;
        this.name = "ApiError";
    }
}
/** 409: the clip already carries a verdict; the current record rides along. */
export class ConflictError extends ApiError {
    constructor(message, record) {
        super(409, message, record);
        this.record = record;
        this.name = "ConflictError";
    }
}
/** fetch itself failed: offline, DNS, aborted — nothing reached the service. */
export class NetworkError extends Error {
    constructor(message) {
        super(message);
        this.name = "NetworkError";
    }
}
async function request(path, init) {
    let resp;
    try {
        resp = await fetch(path, init);
    }
    catch (err) {
        throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
    if (resp.ok) {
        return (await resp.json());
    }
    let detail = null;
    try {
        detail = (await resp.json()).detail ?? null;
    }
    catch {
        // non-JSON error body; keep detail null
    }
    if (resp.status === 409) {
        const doc = detail;
        throw new ConflictError(doc?.message ?? "already verdicted", doc?.record ?? null);
    }
    const message = typeof detail === "string" ? detail : `request failed with status ${resp.status}`;
    throw new ApiError(resp.status, message, detail);
}
export const liveApi = {
    fetchQueue(offset = 0, limit = 100) {
        return request(`/api/queue?offset=${offset}&limit=${limit}`);
    },
    fetchClip(clipId) {
        return request(`/api/clips/${encodeURIComponent(clipId)}`);
    },
    submitVerdict(clipId, label, reviewer) {
        return request(`/api/clips/${encodeURIComponent(clipId)}/verdict`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ label, reviewer }),
        });
    },
    fetchStats() {
        return request("/api/stats");
    },
};
