/** Browser wiring: session store on one side, DOM on the other.
 *
 * Everything here is thin glue; the logic worth testing lives in
 * api.ts, state.ts and views.ts.
 */

import { ApiClient, ModelMeta } from "./api.js";
import { Session, SessionState } from "./state.js";
import {
    displayLabel,
    influenceBars,
    irfChart,
    modelSummary,
    skippedRows,
    whatifRows,
} from "./views.js";

const api = new ApiClient("");
const session = new Session(api);

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

const modelFile = el<HTMLInputElement>("model-file");
const modelStatus = el<HTMLElement>("model-status");
const uploadPrompt = el<HTMLElement>("upload-prompt");
const resultsPane = el<HTMLElement>("results");
const errorBox = el<HTMLElement>("error");
const influenceBox = el<HTMLElement>("influence");
const whatifTarget = el<HTMLSelectElement>("whatif-target");
const whatifPercent = el<HTMLInputElement>("whatif-percent");
const whatifPercentValue = el<HTMLElement>("whatif-percent-value");
const whatifTheta = el<HTMLInputElement>("whatif-theta");
const whatifBox = el<HTMLElement>("whatif");
const irfImpulse = el<HTMLSelectElement>("irf-impulse");
const irfBox = el<HTMLElement>("irf-chart");

function esc(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function settings(): { percent: number; theta?: number } {
    const percent = Number(whatifPercent.value);
    const theta = Number(whatifTheta.value);
    if (whatifTheta.value.trim() !== "" && Number.isFinite(theta) && theta >= 0) {
        return { percent, theta };
    }
    return { percent };
}

function refreshWhatif(): void {
    if (whatifTarget.value !== "") {
        void session.refreshWhatif(whatifTarget.value, settings());
    }
}

function refreshIrf(): void {
    if (irfImpulse.value !== "") {
        void session.refreshIrf(irfImpulse.value);
    }
}

function fillSelect(select: HTMLSelectElement, meta: ModelMeta): void {
    select.innerHTML = meta.variables
        .map(
            (v) =>
                `<option value="${esc(v.name)}">${esc(displayLabel(v.name, meta))}</option>`,
        )
        .join("");
}

function startAnalysis(meta: ModelMeta): void {
    fillSelect(whatifTarget, meta);
    fillSelect(irfImpulse, meta);
    void session.refreshInfluence();
    refreshWhatif();
    refreshIrf();
}

modelFile.addEventListener("change", async () => {
    const file = modelFile.files?.[0];
    if (!file) {
        return;
    }
    try {
        const doc = JSON.parse(await file.text());
        const meta = await session.loadModel(doc);
        startAnalysis(meta);
    } catch (err) {
        // loadModel already surfaced API errors; this catches bad JSON
        if (err instanceof SyntaxError) {
            errorBox.textContent = `not a model file: ${err.message}`;
            errorBox.hidden = false;
        }
    }
});

whatifPercent.addEventListener("input", () => {
    whatifPercentValue.textContent = `${whatifPercent.value}%`;
    refreshWhatif();
});
whatifTheta.addEventListener("change", refreshWhatif);
whatifTarget.addEventListener("change", refreshWhatif);
irfImpulse.addEventListener("change", refreshIrf);

function renderInfluence(state: SessionState): void {
    if (state.influence === null) {
        influenceBox.innerHTML = "<p class=\"placeholder\">waiting for the service</p>";
        return;
    }
    const bars = influenceBars(state.influence, state.meta);
    influenceBox.innerHTML = bars
        .map(
            (bar, i) => `
        <div class="bar-row">
            <span class="bar-rank">${i + 1}.</span>
            <span class="bar-label">${esc(bar.label)}</span>
            <span class="bar-track">
                <span class="bar-fill ${bar.positive ? "pos" : "neg"}"
                      style="width: ${(bar.width * 100).toFixed(1)}%"></span>
            </span>
            <span class="bar-value">${bar.display}</span>
        </div>`,
        )
        .join("");
}

function renderWhatif(state: SessionState): void {
    if (state.whatif === null) {
        whatifBox.innerHTML = "<p class=\"placeholder\">waiting for the service</p>";
        return;
    }
    const rows = whatifRows(state.whatif, state.meta);
    const skipped = skippedRows(state.whatif, state.meta);
    const target = displayLabel(state.whatif.target, state.meta);
    const header = `<p>To change <strong>${esc(target)}</strong> by ${state.whatif.desired_percent}%:</p>`;
    const body =
        rows.length === 0
            ? "<p class=\"placeholder\">no workable suggestion</p>"
            : `<table><thead><tr>
                <th>lever</th><th>change by</th><th>net effect</th><th>horizon</th>
               </tr></thead><tbody>` +
              rows
                  .map(
                      (row) => `<tr>
                <td>${esc(row.action)} ${esc(row.label)}</td>
                <td class="num">${row.display}</td>
                <td class="num">${row.net_effect}</td>
                <td class="num">${row.effect_horizon}</td>
            </tr>`,
                  )
                  .join("") +
              "</tbody></table>";
    const notes =
        skipped.length === 0
            ? ""
            : "<ul class=\"skipped\">" +
              skipped
                  .map((s) => `<li>${esc(s.label)}: ${esc(s.text)}</li>`)
                  .join("") +
              "</ul>";
    whatifBox.innerHTML = header + body + notes;
}

function renderIrf(state: SessionState): void {
    if (state.irf === null || state.irf.length === 0) {
        irfBox.innerHTML = "<p class=\"placeholder\">waiting for the service</p>";
        return;
    }
    const chart = irfChart(state.irf, state.meta);
    const bands = chart.series
        .filter((s) => s.lower !== null && s.upper !== null)
        .map(
            (s) => `
            <polyline class="band" points="${s.lower}" style="stroke: ${s.color}"/>
            <polyline class="band" points="${s.upper}" style="stroke: ${s.color}"/>`,
        )
        .join("");
    const lines = chart.series
        .map((s) => `<polyline class="line" points="${s.line}" style="stroke: ${s.color}"/>`)
        .join("");
    const legend = chart.series
        .map(
            (s) =>
                `<span class="legend-item"><span class="swatch" style="background: ${s.color}"></span>${esc(s.label)}</span>`,
        )
        .join("");
    const note = chart.bootstrap
        ? `<p class="chart-note">dashed: ${((chart.confidence ?? 0) * 100).toFixed(0)}% confidence band</p>`
        : "";
    irfBox.innerHTML = `
        <svg viewBox="0 0 ${chart.width} ${chart.height}" role="img">
            <line class="axis" x1="0" x2="${chart.width}" y1="${chart.zeroY}" y2="${chart.zeroY}"/>
            ${chart.xTicks
                .map(
                    (t) =>
                        `<text class="tick" x="${t.pos}" y="${chart.height - 6}">${t.label}</text>`,
                )
                .join("")}
            ${chart.yTicks
                .map((t) => `<text class="tick" x="4" y="${t.pos}">${t.label}</text>`)
                .join("")}
            ${bands}
            ${lines}
        </svg>
        <div class="legend">${legend}</div>
        ${note}`;
}

function render(state: SessionState): void {
    uploadPrompt.hidden = state.phase !== "no-model";
    resultsPane.hidden = state.phase === "no-model";
    document.body.classList.toggle("busy", state.pending > 0);
    modelStatus.textContent = state.meta === null ? "no model loaded" : modelSummary(state.meta);
    errorBox.hidden = state.error === null;
    errorBox.textContent = state.error ?? "";
    renderInfluence(state);
    renderWhatif(state);
    renderIrf(state);
}

session.subscribe(render);
render(session.snapshot());

// adopt a model the server was started with, if any
void session
    .attach()
    .then((meta) => startAnalysis(meta))
    .catch(() => {
        // 409: nothing preloaded, wait for an upload
    });
