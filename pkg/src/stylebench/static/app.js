/** Review app: queue list, clip inspector, verdict controls, stats panel. */
import { ApiError, ConflictError, NetworkError } from "./api.js";
import { labelName, num, pct, severityClass, trendName } from "./format.js";
import { drawScene } from "./plot.js";
import { canSubmit, clampCursor, initialState, nextClipId, verdictFromKey, } from "./state.js";
function el(doc, tag, attrs = {}, text = "") {
    const node = doc.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    if (text) {
        node.textContent = text;
    }
    return node;
}
function labelBadge(doc, label, title) {
    const badge = el(doc, "span", { class: `badge label-${label ?? "none"}` });
    badge.textContent = `${title} ${label ? labelName(label) : "–"}`;
    return badge;
}
const PAGE = `
<header>
  <h1>clip review</h1>
  <div id="stats" class="stats"></div>
</header>
<main>
  <aside class="queue-panel">
    <div id="queue-status"></div>
    <ul id="queue-list"></ul>
  </aside>
  <section class="clip-panel">
    <div id="clip-header"></div>
    <canvas id="scene" width="520" height="390"></canvas>
    <div class="scrub-row">
      <input id="scrubber" type="range" min="0" max="0" value="0" step="1" />
      <span id="frame-readout"></span>
    </div>
  </section>
  <aside class="side-panel">
    <div id="labels-row"></div>
    <dl id="features"></dl>
    <div class="verdict-row">
      <div class="verdict-buttons">
        <button id="verdict-A" data-label="A">Aggressive (a)</button>
        <button id="verdict-N" data-label="N">Normal (n)</button>
        <button id="verdict-C" data-label="C">Conservative (c)</button>
      </div>
      <input id="reviewer" type="text" placeholder="reviewer" />
      <button id="submit" disabled>Submit (Enter)</button>
    </div>
  </aside>
</main>
<div id="banner" class="banner hidden"></div>
<div id="toast" class="toast hidden"></div>
`;
export function createApp(root, api, options = {}) {
    const doc = root.ownerDocument;
    const opts = { statsPollMs: 5000, toastMs: 4000, queueLimit: 100, ...options };
    root.innerHTML = PAGE;
    const queueList = root.querySelector("#queue-list");
    const queueStatus = root.querySelector("#queue-status");
    const clipHeader = root.querySelector("#clip-header");
    const canvas = root.querySelector("#scene");
    const scrubber = root.querySelector("#scrubber");
    const frameReadout = root.querySelector("#frame-readout");
    const labelsRow = root.querySelector("#labels-row");
    const featureList = root.querySelector("#features");
    const reviewerInput = root.querySelector("#reviewer");
    const submitButton = root.querySelector("#submit");
    const statsPanel = root.querySelector("#stats");
    const banner = root.querySelector("#banner");
    const toast = root.querySelector("#toast");
    const verdictButtons = new Map(["A", "N", "C"].map((label) => [
        label,
        root.querySelector(`#verdict-${label}`),
    ]));
    const state = initialState();
    let detail = null;
    let toastTimer = null;
    try {
        reviewerInput.value =
            doc.defaultView?.localStorage?.getItem("stylebench-reviewer") ?? "";
    }
    catch {
        // storage may be unavailable; the field just starts empty
    }
    function showToast(message) {
        toast.textContent = message;
        toast.classList.remove("hidden");
        if (toastTimer !== null) {
            clearTimeout(toastTimer);
        }
        toastTimer = setTimeout(() => toast.classList.add("hidden"), opts.toastMs);
    }
    function showBanner(message, retry) {
        banner.innerHTML = "";
        banner.append(el(doc, "span", {}, message));
        if (retry) {
            const button = el(doc, "button", {}, "retry");
            button.addEventListener("click", () => {
                hideBanner();
                retry();
            });
            banner.append(button);
        }
        banner.classList.remove("hidden");
    }
    function hideBanner() {
        banner.classList.add("hidden");
        banner.innerHTML = "";
    }
    function syncSubmitControls() {
        submitButton.disabled = !canSubmit(state);
        for (const [label, button] of verdictButtons) {
            button.classList.toggle("selected", state.pendingVerdict === label);
        }
    }
    function renderQueue() {
        queueList.innerHTML = "";
        queueStatus.textContent = state.queueTotal
            ? `${state.queueTotal} pending`
            : "queue drained";
        for (const item of state.queue) {
            const li = el(doc, "li", {
                class: `queue-item ${severityClass(item.severity)}` +
                    (item.clip_id === state.selectedId ? " active" : ""),
                "data-clip": item.clip_id,
            });
            li.append(el(doc, "span", { class: "clip-id" }, item.clip_id));
            li.append(el(doc, "span", { class: "pair" }, `rule ${item.rule_label} / ext ${item.external_label ?? "–"}`));
            li.addEventListener("click", () => {
                void selectClip(item.clip_id);
            });
            queueList.append(li);
        }
    }
    function conflictBadge(item) {
        if (!item || item.external_label === null) {
            return null;
        }
        if (item.external_label === item.rule_label) {
            return null;
        }
        const badge = el(doc, "span", {
            class: `badge conflict ${severityClass(item.severity)}`,
        });
        badge.textContent = `${item.rule_label} vs ${item.external_label}`;
        return badge;
    }
    function renderClip() {
        clipHeader.innerHTML = "";
        labelsRow.innerHTML = "";
        featureList.innerHTML = "";
        if (!detail) {
            clipHeader.textContent = "no clip selected";
            scrubber.max = "0";
            frameReadout.textContent = "";
            return;
        }
        clipHeader.append(el(doc, "strong", {}, detail.clip_id));
        const queueItem = state.queue.find((i) => i.clip_id === detail?.clip_id);
        const badge = conflictBadge(queueItem);
        if (badge) {
            clipHeader.append(badge);
        }
        const record = detail.record;
        labelsRow.append(labelBadge(doc, record.rule_label, "rule"));
        labelsRow.append(labelBadge(doc, record.external_label, "external"));
        labelsRow.append(labelBadge(doc, record.fused_label, "fused"));
        const display = detail.display;
        if (display) {
            state.nSamples = display.path.length;
            scrubber.max = String(Math.max(display.path.length - 1, 0));
            const feats = display.features;
            const rows = [
                ["scenario", display.scenario],
                ["duration", `${num(display.duration_s, 1)} s`],
            ];
            if (feats) {
                rows.push(["v_avg", `${num(feats.v_avg)} m/s`], ["a_max", `${num(feats.a_max)} m/s²`], ["σ_a", `${num(feats.sigma_a)} m/s²`], ["trend", trendName(feats.trend)], ["Δψ", `${num(feats.delta_psi)} rad`], ["unsafe ratio", pct(feats.unsafe_ratio)], ["safe ratio", pct(feats.safe_ratio)], ["min TTC", feats.min_ttc === null ? "–" : `${num(feats.min_ttc)} s`]);
            }
            for (const [term, value] of rows) {
                featureList.append(el(doc, "dt", {}, term));
                featureList.append(el(doc, "dd", {}, value));
            }
        }
        else {
            state.nSamples = 0;
            scrubber.max = "0";
            featureList.append(el(doc, "dt", {}, "display"));
            featureList.append(el(doc, "dd", {}, "no corpus loaded"));
        }
        renderFrame();
    }
    // canvas 2d is unavailable in some embedders; probe once and degrade
    let sceneCtx;
    function renderFrame() {
        scrubber.value = String(state.cursor);
        frameReadout.textContent = state.nSamples
            ? `frame ${state.cursor + 1}/${state.nSamples}`
            : "";
        const display = detail?.display;
        if (!display) {
            return;
        }
        if (sceneCtx === undefined) {
            try {
                sceneCtx = canvas.getContext("2d");
            }
            catch {
                sceneCtx = null;
            }
        }
        if (sceneCtx) {
            drawScene(sceneCtx, display, state.cursor, canvas.width, canvas.height);
        }
    }
    function renderStats(stats) {
        statsPanel.innerHTML = "";
        statsPanel.append(el(doc, "span", {}, `pending ${stats.pending}`), el(doc, "span", {}, `verdicted ${stats.verdicted}`));
        const bars = el(doc, "span", { class: "histogram" });
        for (const label of ["A", "N", "C"]) {
            bars.append(el(doc, "span", { class: `hist hist-${label}` }, `${label} ${stats.final_labels[label] ?? 0}`));
        }
        statsPanel.append(bars);
        statsPanel.append(el(doc, "span", { id: "agreement" }, `agreement ${pct(stats.agreement.rate)}`));
    }
    async function refreshQueue() {
        try {
            const page = await api.fetchQueue(0, opts.queueLimit);
            state.queue = page.items;
            state.queueTotal = page.total;
            renderQueue();
        }
        catch (err) {
            showBanner(`queue load failed: ${err.message}`, () => {
                void refreshQueue();
            });
        }
    }
    async function refreshStats() {
        try {
            renderStats(await api.fetchStats());
        }
        catch {
            // stats are advisory; next poll retries
        }
    }
    async function selectClip(clipId) {
        try {
            detail = await api.fetchClip(clipId);
        }
        catch (err) {
            showBanner(`clip load failed: ${err.message}`, () => {
                void selectClip(clipId);
            });
            return;
        }
        state.selectedId = clipId;
        state.cursor = 0;
        state.pendingVerdict = null;
        renderQueue();
        renderClip();
        syncSubmitControls();
    }
    async function advance(fromId) {
        await refreshQueue();
        const next = nextClipId(state.queue, fromId);
        if (next !== null) {
            await selectClip(next);
        }
        else {
            detail = null;
            state.selectedId = null;
            state.pendingVerdict = null;
            renderClip();
            syncSubmitControls();
        }
    }
    async function submit() {
        if (!canSubmit(state) || state.selectedId === null || !state.pendingVerdict) {
            return;
        }
        const clipId = state.selectedId;
        const verdict = state.pendingVerdict;
        const reviewer = reviewerInput.value.trim() || "anonymous";
        try {
            doc.defaultView?.localStorage?.setItem("stylebench-reviewer", reviewer);
        }
        catch {
            // non-fatal
        }
        state.submitting = true;
        syncSubmitControls();
        try {
            await api.submitVerdict(clipId, verdict, reviewer);
            state.submitting = false;
            showToast(`${clipId}: recorded ${labelName(verdict)}`);
            await advance(clipId);
        }
        catch (err) {
            state.submitting = false;
            if (err instanceof ConflictError) {
                // someone got there first: surface it and skip the clip
                showBanner(`${clipId} already verdicted — queue refreshed`);
                await advance(clipId);
            }
            else if (err instanceof NetworkError) {
                // keep the selection and verdict so Enter retries as-is
                showToast("offline — verdict kept, retry when back");
                syncSubmitControls();
            }
            else if (err instanceof ApiError) {
                showToast(`rejected (${err.status}): ${err.message}`);
                syncSubmitControls();
            }
            else {
                throw err;
            }
        }
        void refreshStats();
    }
    function pickVerdict(label) {
        if (state.selectedId === null) {
            return;
        }
        state.pendingVerdict = label;
        syncSubmitControls();
    }
    for (const [label, button] of verdictButtons) {
        button.addEventListener("click", () => pickVerdict(label));
    }
    submitButton.addEventListener("click", () => {
        void submit();
    });
    scrubber.addEventListener("input", () => {
        state.cursor = clampCursor(Number(scrubber.value), state.nSamples);
        renderFrame();
    });
    function onKey(event) {
        const target = event.target;
        if (target instanceof doc.defaultView.HTMLInputElement &&
            target.type === "text") {
            return;
        }
        if (event.key === "Enter") {
            event.preventDefault();
            void submit();
            return;
        }
        const label = verdictFromKey(event.key);
        if (label) {
            pickVerdict(label);
        }
    }
    doc.addEventListener("keydown", onKey);
    let pollTimer = null;
    if (opts.statsPollMs > 0) {
        pollTimer = setInterval(() => {
            void refreshStats();
        }, opts.statsPollMs);
    }
    const ready = (async () => {
        await refreshQueue();
        await refreshStats();
        const first = nextClipId(state.queue, null);
        if (first !== null) {
            await selectClip(first);
        }
        else {
            renderClip();
            syncSubmitControls();
        }
    })();
    return {
        ready,
        state,
        refreshQueue,
        refreshStats,
        selectClip,
        submit,
        dispose() {
            doc.removeEventListener("keydown", onKey);
            if (pollTimer !== null) {
                clearInterval(pollTimer);
            }
            if (toastTimer !== null) {
                clearTimeout(toastTimer);
            }
        },
    };
}
