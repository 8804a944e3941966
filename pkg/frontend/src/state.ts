/** Session state machine for the single-user UI.
 *
 * Phases move no-model -> model-loaded -> results-shown. Each endpoint
 * has at most one request in flight: starting a new one aborts the old
 * and stamps a ticket, and replies whose ticket (or model epoch) is no
 * longer current are dropped. A model swap bumps the epoch, so nothing
 * computed against the previous model can ever reach the screen.
 */

import {
    AnalysisSettings,
    ApiClient,
    Influence,
    IrfSeries,
    ModelMeta,
    Whatif,
} from "./api.js";

export type Phase = "no-model" | "model-loaded" | "results-shown";

export interface SessionState {
    phase: Phase;
    meta: ModelMeta | null;
    influence: Influence | null;
    whatif: Whatif | null;
    irf: IrfSeries[] | null;
    error: string | null;
    pending: number;
}

export type Listener = (state: SessionState) => void;

function isAbort(err: unknown): boolean {
    return (
        typeof err === "object" &&
        err !== null &&
        (err as { name?: unknown }).name === "AbortError"
    );
}

function message(err: unknown): string {
    return err instanceof Error ? err.message : String(err);
}

export class Session {
    private state: SessionState = {
        phase: "no-model",
        meta: null,
        influence: null,
        whatif: null,
        irf: null,
        error: null,
        pending: 0,
    };
    private epoch = 0;
    private tickets = new Map<string, number>();
    private aborts = new Map<string, AbortController>();
    private listeners: Listener[] = [];

    constructor(private api: ApiClient) {}

    snapshot(): SessionState {
        return this.state;
    }

    subscribe(listener: Listener): () => void {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }

    private patch(part: Partial<SessionState>): void {
        this.state = { ...this.state, ...part };
        for (const listener of this.listeners) {
            listener(this.state);
        }
    }

    /** Swap in a new model; every stale result disappears at once. */
    async loadModel(doc: object): Promise<ModelMeta> {
        const epoch = ++this.epoch;
        for (const controller of this.aborts.values()) {
            controller.abort();
        }
        this.aborts.clear();
        this.patch({ pending: this.state.pending + 1 });
        try {
            const meta = await this.api.uploadModel(doc);
            if (epoch === this.epoch) {
                this.patch({
                    phase: "model-loaded",
                    meta,
                    influence: null,
                    whatif: null,
                    irf: null,
                    error: null,
                });
            }
            return meta;
        } catch (err) {
            if (epoch === this.epoch && !isAbort(err)) {
                this.patch({ error: message(err) });
            }
            throw err;
        } finally {
            this.patch({ pending: this.state.pending - 1 });
        }
    }

    /** Adopt a model the server already has (e.g. preloaded via --model). */
    async attach(): Promise<ModelMeta> {
        const epoch = ++this.epoch;
        const meta = await this.api.meta();
        if (epoch === this.epoch) {
            this.patch({
                phase: "model-loaded",
                meta,
                influence: null,
                whatif: null,
                irf: null,
                error: null,
            });
        }
        return meta;
    }

    refreshInfluence(settings: AnalysisSettings = {}): Promise<void> {
        return this.request(
            "influence",
            (signal) => this.api.influence(settings, signal),
            (influence) => ({ influence }),
        );
    }

    refreshWhatif(target: string, settings: AnalysisSettings = {}): Promise<void> {
        return this.request(
            "whatif",
            (signal) => this.api.whatif(target, settings, signal),
            (whatif) => ({ whatif }),
        );
    }

    /** One series per response variable, all for the same impulse. */
    refreshIrf(impulse: string, settings: AnalysisSettings = {}): Promise<void> {
        const names = this.state.meta?.variables.map((v) => v.name) ?? [];
        return this.request(
            "irf",
            (signal) =>
                Promise.all(
                    names.map((response) => this.api.irf(impulse, response, settings, signal)),
                ),
            (irf) => ({ irf }),
        );
    }

    private async request<T>(
        endpoint: string,
        call: (signal: AbortSignal) => Promise<T>,
        apply: (result: T) => Partial<SessionState>,
    ): Promise<void> {
        const epoch = this.epoch;
        const ticket = (this.tickets.get(endpoint) ?? 0) + 1;
        this.tickets.set(endpoint, ticket);
        this.aborts.get(endpoint)?.abort();
        const controller = new AbortController();
        this.aborts.set(endpoint, controller);
        this.patch({ pending: this.state.pending + 1 });
        try {
            const result = await call(controller.signal);
            if (epoch !== this.epoch || ticket !== this.tickets.get(endpoint)) {
                return;
            }
            this.patch({ ...apply(result), phase: "results-shown", error: null });
        } catch (err) {
            if (epoch !== this.epoch || ticket !== this.tickets.get(endpoint)) {
                return;
            }
            if (!isAbort(err)) {
                // keep the previous results on screen, only surface the message
                this.patch({ error: message(err) });
            }
        } finally {
            this.patch({ pending: this.state.pending - 1 });
        }
    }
}
