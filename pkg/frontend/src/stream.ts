import { StreamFrame } from "./types";

export interface SocketLike {
    onopen: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
    close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionState = "connecting" | "open" | "closed" | "reconnecting";

/**
 * WebSocket subscription with automatic reconnect.
 *
 * The service sends a full state snapshot on every (re)connect, so simply
 * reopening the socket resumes the view; no client-side replay is needed.
 */
export class StreamClient {
    private socket: SocketLike | null = null;
    private stopped = false;
    private timer: ReturnType<typeof setTimeout> | null = null;
    reconnects = 0;

    constructor(
        private readonly url: string,
        private readonly onFrame: (frame: StreamFrame) => void,
        private readonly onConnection: (state: ConnectionState) => void = () => {},
        private readonly factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
        private readonly reconnectDelayMs = 400,
    ) {}

    /** Open the socket; the returned promise settles once the connection
     * is established (or abandoned), so callers can steer immediately
     * after awaiting it. */
    connect(): Promise<void> {
        this.stopped = false;
        this.onConnection(this.reconnects > 0 ? "reconnecting" : "connecting");
        const socket = this.factory(this.url);
        this.socket = socket;
        return new Promise((resolve) => {
            socket.onopen = () => {
                this.onConnection("open");
                resolve();
            };
            socket.onmessage = (ev) => {
                try {
                    this.onFrame(JSON.parse(String(ev.data)) as StreamFrame);
                } catch {
                    // malformed frame; keep the stream alive
                }
            };
            socket.onerror = () => {
                // the close handler drives reconnection
            };
            socket.onclose = () => {
                this.socket = null;
                resolve();
                if (this.stopped) {
                    this.onConnection("closed");
                    return;
                }
                this.reconnects += 1;
                this.onConnection("reconnecting");
                this.timer = setTimeout(() => void this.connect(), this.reconnectDelayMs);
            };
        });
    }

    close(): void {
        this.stopped = true;
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
        if (this.socket) {
            this.socket.close();
        }
        this.onConnection("closed");
    }
}
