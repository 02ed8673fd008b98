import { AnalysisReport, ParameterAck, SessionSnapshot } from "./types";

export interface CreateSessionRequest {
    graph: string | object;
    mode: "line" | "planar";
    x0: number[];
    dt?: number;
    realtime_factor?: number;
}

export interface AckWithTiming extends ParameterAck {
    roundTripMs: number;
}

type FetchLike = typeof fetch;

/** Thin typed client over the steering service's HTTP endpoints. */
export class ServiceClient {
    constructor(
        readonly baseUrl: string,
        private readonly fetchFn: FetchLike = fetch,
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
        if (!resp.ok) {
            const body = await resp.text();
            throw new Error(`${init?.method ?? "GET"} ${path} -> ${resp.status}: ${body}`);
        }
        return (await resp.json()) as T;
    }

    createSession(req: CreateSessionRequest): Promise<SessionSnapshot> {
        return this.request("/sessions", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(req),
        });
    }

    getSession(id: string): Promise<SessionSnapshot> {
        return this.request(`/sessions/${id}`);
    }

    async setParameter(id: string, s: number): Promise<AckWithTiming> {
        const start = now();
        const ack = await this.request<ParameterAck>(`/sessions/${id}/parameter`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ s }),
        });
        return { ...ack, roundTripMs: now() - start };
    }

    run(id: string): Promise<SessionSnapshot> {
        return this.request(`/sessions/${id}/run`, { method: "POST" });
    }

    pause(id: string): Promise<SessionSnapshot> {
        return this.request(`/sessions/${id}/pause`, { method: "POST" });
    }

    analyze(graphSpec: string): Promise<AnalysisReport> {
        return this.request(`/analyze?graph=${encodeURIComponent(graphSpec)}`);
    }

    streamUrl(id: string, rate = 30): string {
        const ws = this.baseUrl.replace(/^http/, "ws");
        return `${ws}/sessions/${id}/stream?rate=${rate}`;
    }
}

function now(): number {
    return typeof performance !== "undefined" ? performance.now() : Date.now();
}
