export type SessionStatus = "running" | "paused" | "diverged" | "converged";

export interface SessionSnapshot {
    id: string;
    graph: string;
    n: number;
    mode: "line" | "planar";
    dt: number;
    t: number;
    s: number;
    status: SessionStatus;
    state: number[];
}

export interface StreamFrame {
    type: "state" | "status" | "ack";
    t?: number;
    s?: number;
    status?: string;
    state?: number[];
}

export interface ParameterAck {
    applied: boolean;
    s: number;
    effective_t: number;
}

export interface MarginalEntry {
    s: number;
    kind: string;
    groups?: number[][];
    frequency?: number;
}

export interface AnalysisReport {
    graph: string;
    method: string;
    stable: Array<[number | string, number | string]>;
    unstable: Array<[number | string, number | string]>;
    marginal: MarginalEntry[];
    presets?: Preset[];
}

export interface Preset {
    label: string;
    s: number;
}

export interface Point {
    x: number;
    y: number;
}
