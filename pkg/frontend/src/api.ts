/** Typed client for the advice service HTTP API.
 *
 * Every interface here mirrors a response document field for field; the
 * UI renders these values verbatim and never computes advice locally.
 */

export interface VariableMeta {
    name: string;
    polarity: string;
    mean: number;
    sd: number;
}

export interface ModelMeta {
    version: number;
    kind: string;
    variables: VariableMeta[];
    lags: number;
    interval_minutes: number;
    exogenous: string[];
    stable: boolean;
    spectral_radius: number;
    can_bootstrap: boolean;
}

export interface InfluenceEntry {
    variable: string;
    net_effect: number;
}

export interface Influence {
    horizon: number;
    bootstrap: boolean;
    entries: InfluenceEntry[];
}

export interface IrfStep {
    t: number;
    minutes: number;
    value: number;
    lower: number | null;
    upper: number | null;
}

export interface IrfSeries {
    version: number;
    kind: string;
    impulse: string;
    response: string;
    horizon: number;
    interval_minutes: number;
    orthogonalized: boolean;
    bootstrap: boolean;
    confidence: number | null;
    steps: IrfStep[];
}

export interface WhatifSuggestion {
    variable: string;
    required_percent: number;
    net_effect: number;
    effect_horizon: number;
}

export interface WhatifSkipped {
    variable: string;
    reason: string;
}

export interface Whatif {
    version: number;
    kind: string;
    target: string;
    desired_percent: number;
    theta: number;
    window: number;
    suggestions: WhatifSuggestion[];
    skipped: WhatifSkipped[];
}

export interface EffectLength {
    version: number;
    kind: string;
    impulse: string;
    response: string;
    horizon: number;
    interval_minutes: number;
    total_minutes: number;
    total_steps: number;
    effective_horizon: number;
}

/** Analysis knobs accepted by every POST endpoint; omitted fields fall
 *  back to the server's startup configuration. */
export interface AnalysisSettings {
    horizon?: number;
    bootstrap?: boolean;
    iterations?: number;
    confidence?: number;
    seed?: number;
    workers?: number;
    theta?: number;
    window?: number;
    percent?: number;
    interval_minutes?: number;
}

interface FieldError {
    field: string;
    message: string;
}

function describeDetail(status: number, detail: unknown): string {
    if (typeof detail === "string") {
        return detail;
    }
    if (Array.isArray(detail)) {
        const parts = (detail as FieldError[])
            .filter((d) => d && typeof d.message === "string")
            .map((d) => (d.field ? `${d.field}: ${d.message}` : d.message));
        if (parts.length > 0) {
            return parts.join("; ");
        }
    }
    return `request failed with status ${status}`;
}

export class ApiError extends Error {
    readonly status: number;
    readonly detail: unknown;

    constructor(status: number, detail: unknown) {
        super(describeDetail(status, detail));
        this.name = "ApiError";
        this.status = status;
        this.detail = detail;
    }
}

async function unwrap<T>(response: Response): Promise<T> {
    if (response.ok) {
        return (await response.json()) as T;
    }
    let detail: unknown = null;
    try {
        detail = (await response.json()).detail;
    } catch {
        // non-JSON error body; the status code is all we have
    }
    throw new ApiError(response.status, detail);
}

export class ApiClient {
    constructor(readonly base: string = "") {}

    private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
        const response = await fetch(this.base + path, { signal });
        return unwrap<T>(response);
    }

    private async post<T>(path: string, body: object, signal?: AbortSignal): Promise<T> {
        const response = await fetch(this.base + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
            signal,
        });
        return unwrap<T>(response);
    }

    meta(signal?: AbortSignal): Promise<ModelMeta> {
        return this.get("/api/model/meta", signal);
    }

    /** Load a model document produced by `varpulse fit`. */
    uploadModel(doc: object, signal?: AbortSignal): Promise<ModelMeta> {
        return this.post("/api/model", { model: doc }, signal);
    }

    /** Fit a model server-side from raw diary CSV text. */
    uploadCsv(
        csv: string,
        lags: number,
        intervalMinutes: number,
        polarity?: Record<string, string>,
        exogenous?: string[],
        signal?: AbortSignal,
    ): Promise<ModelMeta> {
        const body: Record<string, unknown> = {
            csv,
            lags,
            interval_minutes: intervalMinutes,
        };
        if (polarity !== undefined) {
            body.polarity = polarity;
        }
        if (exogenous !== undefined) {
            body.exogenous = exogenous;
        }
        return this.post("/api/model", body, signal);
    }

    influence(settings: AnalysisSettings = {}, signal?: AbortSignal): Promise<Influence> {
        return this.post("/api/influence", { ...settings }, signal);
    }

    irf(
        impulse: string,
        response: string,
        settings: AnalysisSettings = {},
        signal?: AbortSignal,
    ): Promise<IrfSeries> {
        return this.post("/api/irf", { impulse, response, ...settings }, signal);
    }

    whatif(
        target: string,
        settings: AnalysisSettings = {},
        signal?: AbortSignal,
    ): Promise<Whatif> {
        return this.post("/api/whatif", { target, ...settings }, signal);
    }

    effectLength(
        impulse: string,
        response: string,
        settings: AnalysisSettings = {},
        signal?: AbortSignal,
    ): Promise<EffectLength> {
        return this.post("/api/effect-length", { impulse, response, ...settings }, signal);
    }
}
