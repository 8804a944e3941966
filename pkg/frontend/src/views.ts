/** Pure view-model builders: API documents in, render-ready data out.
 *
 * Numbers are carried through verbatim; the only client-side work is
 * layout (bar widths, chart coordinates) and display formatting. All
 * of this is plain data so it can be tested without a browser.
 */

import { Influence, IrfSeries, ModelMeta, Whatif } from "./api.js";

/** Display formatting for effects and percentages (three decimals,
 *  mirroring the service's own text reports). */
export function fmt(value: number): string {
    return value.toFixed(3);
}

/** Negative-polarity variables read better flipped: the service scores
 *  "less stress" as the improvement, so label it that way. */
export function displayLabel(name: string, meta: ModelMeta | null): string {
    const variable = meta?.variables.find((v) => v.name === name);
    if (variable && variable.polarity === "negative") {
        return `less ${name}`;
    }
    return name;
}

export function modelSummary(meta: ModelMeta): string {
    const m = meta.variables.length;
    const stability = meta.stable
        ? `stable (radius ${fmt(meta.spectral_radius)})`
        : `unstable (radius ${fmt(meta.spectral_radius)})`;
    return (
        `${m} variable${m === 1 ? "" : "s"}, ${meta.lags} lag${meta.lags === 1 ? "" : "s"}, ` +
        `${meta.interval_minutes} min interval, ${stability}`
    );
}

// ------------------------------------------------------------ influence

export interface InfluenceBar {
    variable: string;
    label: string;
    /** Net effect exactly as the API reported it. */
    net_effect: number;
    display: string;
    /** Share of the longest bar, 0..1. */
    width: number;
    positive: boolean;
}

/** Bars in exactly the order of the API ranking. */
export function influenceBars(influence: Influence, meta: ModelMeta | null): InfluenceBar[] {
    const peak = influence.entries.reduce(
        (acc, e) => Math.max(acc, Math.abs(e.net_effect)),
        0,
    );
    return influence.entries.map((entry) => ({
        variable: entry.variable,
        label: displayLabel(entry.variable, meta),
        net_effect: entry.net_effect,
        display: fmt(entry.net_effect),
        width: peak === 0 ? 0 : Math.abs(entry.net_effect) / peak,
        positive: entry.net_effect >= 0,
    }));
}

// -------------------------------------------------------------- what-if

export interface WhatifRow {
    variable: string;
    label: string;
    required_percent: number;
    net_effect: number;
    effect_horizon: number;
    /** Direction verb for the sentence around the raw number. */
    action: "increase" | "decrease";
    display: string;
}

export interface SkippedRow {
    variable: string;
    label: string;
    reason: string;
    text: string;
}

const SKIP_TEXT: Record<string, string> = {
    no_effect: "no measurable effect on the target",
    below_threshold: "net effect does not exceed the threshold",
    zero_mean: "mean of zero, percent change undefined",
    zero_sd: "no variation to work with",
    outside_window: "required change outside the admissible window",
};

export function whatifRows(whatif: Whatif, meta: ModelMeta | null): WhatifRow[] {
    return whatif.suggestions.map((s) => ({
        variable: s.variable,
        label: displayLabel(s.variable, meta),
        required_percent: s.required_percent,
        net_effect: s.net_effect,
        effect_horizon: s.effect_horizon,
        action: s.required_percent < 0 ? "decrease" : "increase",
        display: `${fmt(s.required_percent)}%`,
    }));
}

export function skippedRows(whatif: Whatif, meta: ModelMeta | null): SkippedRow[] {
    return whatif.skipped.map((s) => ({
        variable: s.variable,
        label: displayLabel(s.variable, meta),
        reason: s.reason,
        text: SKIP_TEXT[s.reason] ?? s.reason,
    }));
}

// ---------------------------------------------------------------- chart

export interface ChartSeriesModel {
    response: string;
    label: string;
    color: string;
    /** Step values exactly as the API reported them. */
    values: number[];
    /** SVG polyline point strings (pixel space). */
    line: string;
    lower: string | null;
    upper: string | null;
}

export interface ChartTick {
    pos: number;
    label: string;
}

export interface ChartModel {
    width: number;
    height: number;
    impulse: string;
    bootstrap: boolean;
    confidence: number | null;
    zeroY: number;
    xTicks: ChartTick[];
    yTicks: ChartTick[];
    series: ChartSeriesModel[];
}

const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];
const MARGIN = { top: 12, right: 16, bottom: 24, left: 48 };

function px(value: number): number {
    return Math.round(value * 100) / 100;
}

/** Lay out one multi-line response chart: one line per response
 *  variable, dashed confidence bands when the service sent them. */
export function irfChart(
    seriesList: IrfSeries[],
    meta: ModelMeta | null,
    width = 640,
    height = 300,
): ChartModel {
    if (seriesList.length === 0) {
        throw new Error("irfChart needs at least one series");
    }
    const horizon = seriesList[0].horizon;
    let lo = 0;
    let hi = 0;
    for (const series of seriesList) {
        for (const step of series.steps) {
            lo = Math.min(lo, step.value, step.lower ?? step.value);
            hi = Math.max(hi, step.value, step.upper ?? step.value);
        }
    }
    if (hi === lo) {
        hi = lo + 1;
    }
    const pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;

    const innerW = width - MARGIN.left - MARGIN.right;
    const innerH = height - MARGIN.top - MARGIN.bottom;
    const x = (t: number) => MARGIN.left + (horizon === 0 ? 0 : (t / horizon) * innerW);
    const y = (v: number) => MARGIN.top + ((hi - v) / (hi - lo)) * innerH;

    const toLine = (values: (number | null)[]): string | null => {
        if (values.some((v) => v === null)) {
            return null;
        }
        return values.map((v, t) => `${px(x(t))},${px(y(v as number))}`).join(" ");
    };

    const xTickStep = Math.max(1, Math.ceil(horizon / 10));
    const xTicks: ChartTick[] = [];
    for (let t = 0; t <= horizon; t += xTickStep) {
        xTicks.push({ pos: px(x(t)), label: String(t) });
    }
    const yTicks: ChartTick[] = [];
    for (let i = 0; i <= 4; i++) {
        const v = lo + ((hi - lo) * i) / 4;
        yTicks.push({ pos: px(y(v)), label: v.toFixed(2) });
    }

    const first = seriesList[0];
    return {
        width,
        height,
        impulse: first.impulse,
        bootstrap: first.bootstrap,
        confidence: first.confidence,
        zeroY: px(y(0)),
        xTicks,
        yTicks,
        series: seriesList.map((series, i) => ({
            response: series.response,
            label: displayLabel(series.response, meta),
            color: PALETTE[i % PALETTE.length],
            values: series.steps.map((step) => step.value),
            line: toLine(series.steps.map((step) => step.value)) as string,
            lower: toLine(series.steps.map((step) => step.lower)),
            upper: toLine(series.steps.map((step) => step.upper)),
        })),
    };
}
