import { Point, SessionSnapshot, SessionStatus, StreamFrame } from "./types";

export interface ViewSnapshot {
    t: number;
    s: number;
    positions: Point[];
}

export interface SwitchMark {
    t: number;
    s: number;
    positions: Point[];
}

const DEFAULT_TRAIL_LIMIT = 2000;

/** Convert a raw state vector into agent positions.
 *
 * Planar states are interleaved [p1x, p1y, ...]; line states are rendered
 * as value-over-index so one-dimensional runs still show motion. */
export function stateToPositions(state: number[], mode: "line" | "planar"): Point[] {
    if (mode === "planar") {
        const pts: Point[] = [];
        for (let i = 0; i + 1 < state.length; i += 2) {
            pts.push({ x: state[i], y: state[i + 1] });
        }
        return pts;
    }
    return state.map((v, i) => ({ x: i + 1, y: v }));
}

/**
 * The client-side mirror of one session.
 *
 * Holds only what rendering needs: the latest snapshot, a bounded trail,
 * the last *acknowledged* s (the value shown in the header; optimistic
 * slider positions never leak into it), and the switch marks drawn as
 * stars on the trail.
 */
export class ViewState {
    readonly sessionId: string;
    readonly mode: "line" | "planar";
    readonly trailLimit: number;

    latest: ViewSnapshot | null = null;
    trail: ViewSnapshot[] = [];
    ackedS: number;
    status: SessionStatus;
    banner: string | null = null;
    frozen = false;
    switchMarks: SwitchMark[] = [];

    constructor(snapshot: SessionSnapshot, trailLimit = DEFAULT_TRAIL_LIMIT) {
        this.sessionId = snapshot.id;
        this.mode = snapshot.mode;
        this.trailLimit = trailLimit;
        this.ackedS = snapshot.s;
        this.status = snapshot.status;
        this.applyState(snapshot.t, snapshot.s, snapshot.state);
    }

    private applyState(t: number, s: number, state: number[]): void {
        const snap = { t, s, positions: stateToPositions(state, this.mode) };
        this.latest = snap;
        this.trail.push(snap);
        if (this.trail.length > this.trailLimit) {
            this.trail.splice(0, this.trail.length - this.trailLimit);
        }
    }

    private applyStatus(status: string): void {
        this.status = status as SessionStatus;
        if (status === "diverged") {
            this.banner = "simulation diverged (state norm exceeded the guard)";
            this.frozen = true;
        } else if (status === "converged") {
            this.banner = "steady state reached";
            this.frozen = true;
        } else if (status === "running") {
            this.banner = null;
            this.frozen = false;
        }
    }

    apply(frame: StreamFrame): void {
        switch (frame.type) {
            case "state":
                if (frame.state && frame.t !== undefined && frame.s !== undefined) {
                    this.applyState(frame.t, frame.s, frame.state);
                }
                if (frame.status) {
                    this.applyStatus(frame.status);
                }
                break;
            case "status":
                if (frame.status) {
                    this.applyStatus(frame.status);
                }
                break;
            case "ack":
                if (frame.s !== undefined) {
                    this.ackedS = frame.s;
                }
                if (frame.t !== undefined && this.latest) {
                    this.switchMarks.push({
                        t: frame.t,
                        s: frame.s ?? this.ackedS,
                        positions: this.latest.positions.slice(),
                    });
                }
                break;
        }
    }
}
