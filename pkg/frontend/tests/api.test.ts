import { afterEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

const realFetch = globalThis.fetch;

interface Call {
    url: string;
    init?: RequestInit;
}

function stubFetch(status: number, body: unknown): Call[] {
    const calls: Call[] = [];
    globalThis.fetch = (async (url: unknown, init?: RequestInit) => {
        calls.push({ url: String(url), init });
        return new Response(JSON.stringify(body), {
            status,
            headers: { "Content-Type": "application/json" },
        });
    }) as typeof fetch;
    return calls;
}

function sentBody(call: Call): unknown {
    return JSON.parse(String(call.init?.body));
}

afterEach(() => {
    globalThis.fetch = realFetch;
});

describe("ApiClient requests", () => {
    it("gets model metadata", async () => {
        const calls = stubFetch(200, { kind: "model_meta", lags: 1 });
        const client = new ApiClient("http://x");
        const meta = await client.meta();
        expect(calls[0].url).toBe("http://x/api/model/meta");
        expect(calls[0].init?.method).toBeUndefined();
        expect(meta.lags).toBe(1);
    });

    it("posts analysis settings as the request body", async () => {
        const calls = stubFetch(200, { horizon: 5, bootstrap: false, entries: [] });
        await new ApiClient().influence({ horizon: 5, seed: 3 });
        expect(calls[0].url).toBe("/api/influence");
        expect(calls[0].init?.method).toBe("POST");
        expect(
            (calls[0].init?.headers as Record<string, string>)["Content-Type"],
        ).toBe("application/json");
        expect(sentBody(calls[0])).toEqual({ horizon: 5, seed: 3 });
    });

    it("names the impulse and response pair", async () => {
        const calls = stubFetch(200, { steps: [] });
        await new ApiClient().irf("mood", "stress", { horizon: 3 });
        expect(calls[0].url).toBe("/api/irf");
        expect(sentBody(calls[0])).toEqual({
            impulse: "mood",
            response: "stress",
            horizon: 3,
        });
    });

    it("names the what-if target", async () => {
        const calls = stubFetch(200, { suggestions: [], skipped: [] });
        await new ApiClient().whatif("mood", { percent: 25, theta: 0.1 });
        expect(sentBody(calls[0])).toEqual({ target: "mood", percent: 25, theta: 0.1 });
    });

    it("wraps an uploaded model document", async () => {
        const calls = stubFetch(200, { kind: "model_meta" });
        await new ApiClient().uploadModel({ lags: 1 });
        expect(calls[0].url).toBe("/api/model");
        expect(sentBody(calls[0])).toEqual({ model: { lags: 1 } });
    });

    it("sends csv uploads with optional fields only when given", async () => {
        const calls = stubFetch(200, { kind: "model_meta" });
        const client = new ApiClient();
        await client.uploadCsv("a,b\n1,2\n", 1, 360);
        expect(sentBody(calls[0])).toEqual({
            csv: "a,b\n1,2\n",
            lags: 1,
            interval_minutes: 360,
        });
        await client.uploadCsv("a,b\n1,2\n", 1, 360, { a: "negative" }, ["b"]);
        expect(sentBody(calls[1])).toEqual({
            csv: "a,b\n1,2\n",
            lags: 1,
            interval_minutes: 360,
            polarity: { a: "negative" },
            exogenous: ["b"],
        });
    });
});

describe("ApiClient errors", () => {
    it("unwraps field-level validation details", async () => {
        stubFetch(400, {
            detail: [
                { field: "percent", message: "must be a number" },
                { field: "horizon", message: "must be an integer" },
            ],
        });
        const err = await new ApiClient().influence().catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.status).toBe(400);
        expect(err.message).toBe(
            "percent: must be a number; horizon: must be an integer",
        );
        expect(err.detail).toHaveLength(2);
    });

    it("passes string details through", async () => {
        stubFetch(409, { detail: "no model loaded; POST /api/model first" });
        const err = await new ApiClient().meta().catch((e) => e);
        expect(err.status).toBe(409);
        expect(err.message).toBe("no model loaded; POST /api/model first");
    });

    it("falls back to the status code for unreadable bodies", async () => {
        globalThis.fetch = (async () =>
            new Response("boom", { status: 500 })) as typeof fetch;
        const err = await new ApiClient().meta().catch((e) => e);
        expect(err.message).toBe("request failed with status 500");
    });
});
