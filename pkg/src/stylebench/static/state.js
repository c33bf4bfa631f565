/** Pure view-state helpers; all DOM-free so they unit test directly. */
export function initialState() {
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
export function clampCursor(cursor, sampleCount) {
    if (sampleCount <= 0) {
        return 0;
    }
    return Math.min(Math.max(Math.round(cursor), 0), sampleCount - 1);
}
/** Submit needs a selected clip and verdict, and no request in flight. */
export function canSubmit(state) {
    return (state.selectedId !== null && state.pendingVerdict !== null && !state.submitting);
}
/** The clip to advance to once `afterId` leaves the queue. */
export function nextClipId(queue, afterId) {
    for (const item of queue) {
        if (item.clip_id !== afterId) {
            return item.clip_id;
        }
    }
    return null;
}
export function verdictFromKey(key) {
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
