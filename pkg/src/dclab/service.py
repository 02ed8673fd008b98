"""HTTP/WebSocket host for steering a live simulation's parameter s.

One simulation loop per session; commands land between whole RK4 steps, so
every delivered state is the result of full steps under a single s.  The
command log (effective simulation times) makes any session replayable as a
batch run with an equivalent switching schedule, bit for bit.

Endpoints
---------
POST /sessions                      create (paused at t=0, s=1)
GET  /sessions/{id}                 snapshot
POST /sessions/{id}/parameter       {"s": value} -> ack with effective time
POST /sessions/{id}/run | /pause    start / stop the loop
GET  /sessions/{id}/log             command log + equivalent schedule
GET  /sessions/{id}/trajectory      every recorded step
GET  /analyze?graph=<spec>          stability report + preset list
WS   /sessions/{id}/stream?rate=30  frames {type: state|status|ack, t, s, state}
"""

from __future__ import annotations

import asyncio
import logging
import math
import time
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .dynamics import DIVERGENCE_LIMIT, rk4_step_matrix
from .errors import DclabError
from .graphio import resolve_graph_source
from .graphs import Graph, deformed_laplacian
from .reports import analyze_source, attach_presets

log = logging.getLogger("dclab.service")

MAX_SESSIONS = 64
DEFAULT_S = 1.0
CHUNK_SIM_SECONDS = 1.0 / 60.0
STEADY_TOL = 1e-9
STEADY_STEPS = 100
#: ceiling on broadcast state frames, so unpaced sessions cannot flood
#: subscriber queues and evict control frames
MAX_STATE_BROADCAST_HZ = 240.0


class CreateSessionRequest(BaseModel):
    graph: str | dict
    mode: str = "line"  # line | planar
    x0: list[float]
    dt: float = 1e-3
    realtime_factor: float = 1.0  # sim seconds per wall second; 0 = unpaced


class ParameterRequest(BaseModel):
    s: float


class Session:
    def __init__(self, sid: str, graph: Graph, mode: str, x0: np.ndarray, dt: float,
                 realtime_factor: float):
        self.id = sid
        self.graph = graph
        self.mode = mode
        self.dt = dt
        self.realtime_factor = realtime_factor
        self.s = DEFAULT_S
        self.step_index = 0
        self.state = x0.copy()
        self.status = "paused"
        self.command_log: list[tuple[float, float]] = [(0.0, DEFAULT_S)]
        self.times = [0.0]
        self.states = [x0.copy()]
        self.s_samples = [DEFAULT_S]
        self.subscribers: list[asyncio.Queue] = []
        self.task: asyncio.Task | None = None
        self._matrices: tuple[float, np.ndarray, np.ndarray] | None = None
        self._quiet_steps = 0

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    def _system(self):
        if self._matrices is None or self._matrices[0] != self.s:
            m = -deformed_laplacian(self.graph, self.s)
            if self.mode == "planar":
                m = np.kron(m, np.eye(2))
            self._matrices = (self.s, m, rk4_step_matrix(m, self.dt))
        return self._matrices[1], self._matrices[2]

    def set_parameter(self, s: float) -> float:
        """Apply s before the next step; returns the simulation time of first effect."""
        if s != self.s:
            self.s = s
            self.command_log.append((self.t, s))
            self._matrices = None
        return self.t

    def advance(self, max_steps: int) -> int:
        """Run at most max_steps whole RK4 steps under the current s."""
        m, phi = self._system()
        done = 0
        for _ in range(max_steps):
            self.state = phi @ self.state
            self.step_index += 1
            done += 1
            self.times.append(self.t)
            self.states.append(self.state.copy())
            self.s_samples.append(self.s)
            if np.abs(self.state).max() > DIVERGENCE_LIMIT:
                self.status = "diverged"
                break
            if np.abs(m @ self.state).max() < STEADY_TOL:
                self._quiet_steps += 1
                if self._quiet_steps >= STEADY_STEPS:
                    self.status = "converged"
                    break
            else:
                self._quiet_steps = 0
        return done

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "graph": self.graph.label(),
            "n": self.graph.n,
            "mode": self.mode,
            "dt": self.dt,
            "t": self.t,
            "s": self.s,
            "status": self.status,
            "state": [float(v) for v in self.state],
        }

    def broadcast(self, frame: dict) -> None:
        for queue in list(self.subscribers):
            try:
                queue.put_nowait(frame)
            except asyncio.QueueFull:
                try:  # drop the oldest frame; status/ack frames stay newest
                    queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass
                queue.put_nowait(frame)

    def state_frame(self) -> dict:
        return {
            "type": "state",
            "t": self.t,
            "s": self.s,
            "status": self.status,
            "state": [float(v) for v in self.state],
        }

    def status_frame(self) -> dict:
        return {"type": "status", "t": self.t, "s": self.s, "status": self.status}


async def _session_loop(session: Session) -> None:
    chunk = max(1, round(CHUNK_SIM_SECONDS / session.dt))
    last_state_broadcast = 0.0
    while session.status == "running":
        wall_start = time.monotonic()
        done = session.advance(chunk)
        if session.status in ("diverged", "converged"):
            session.broadcast(session.state_frame())
            session.broadcast(session.status_frame())
            break
        now = time.monotonic()
        if now - last_state_broadcast >= 1.0 / MAX_STATE_BROADCAST_HZ:
            session.broadcast(session.state_frame())
            last_state_broadcast = now
        if session.realtime_factor > 0:
            budget = done * session.dt / session.realtime_factor
            elapsed = time.monotonic() - wall_start
            await asyncio.sleep(max(0.0, budget - elapsed))
        else:
            await asyncio.sleep(0)


def create_app() -> FastAPI:
    app = FastAPI(title="deformed-consensus steering service")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def get_session(sid: str) -> Session:
        try:
            return sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")

    @app.post("/sessions", status_code=201)
    async def create_session(req: CreateSessionRequest):
        if len(sessions) >= MAX_SESSIONS:
            raise HTTPException(status_code=503, detail="session capacity exceeded")
        try:
            graph = resolve_graph_source(req.graph)
        except (DclabError, OSError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"invalid graph: {exc}")
        if req.mode not in ("line", "planar"):
            raise HTTPException(status_code=422, detail=f"unknown mode {req.mode!r}")
        dim = graph.n * (2 if req.mode == "planar" else 1)
        x0 = np.asarray(req.x0, dtype=float)
        if x0.shape != (dim,):
            raise HTTPException(
                status_code=422, detail=f"x0 must have dimension {dim}, got {x0.shape}"
            )
        if not np.all(np.isfinite(x0)):
            raise HTTPException(status_code=422, detail="x0 must be finite")
        if not (req.dt > 0 and math.isfinite(req.dt)):
            raise HTTPException(status_code=422, detail="dt must be positive")
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = Session(sid, graph, req.mode, x0, req.dt, req.realtime_factor)
        return sessions[sid].snapshot()

    @app.get("/sessions/{sid}")
    async def get_snapshot(sid: str):
        return get_session(sid).snapshot()

    @app.delete("/sessions/{sid}")
    async def delete_session(sid: str):
        session = get_session(sid)
        session.status = "paused"
        if session.task is not None:
            session.task.cancel()
        del sessions[sid]
        return {"deleted": sid}

    @app.post("/sessions/{sid}/parameter")
    async def set_parameter(sid: str, req: ParameterRequest):
        session = get_session(sid)
        if not math.isfinite(req.s):
            raise HTTPException(status_code=422, detail="s must be finite")
        effective = session.set_parameter(req.s)
        ack = {"type": "ack", "t": effective, "s": session.s, "status": session.status}
        session.broadcast(ack)
        return {"applied": True, "s": session.s, "effective_t": effective}

    @app.post("/sessions/{sid}/run")
    async def run_session(sid: str):
        session = get_session(sid)
        if session.status != "running":
            session.status = "running"
            session._quiet_steps = 0
            session.task = asyncio.create_task(_session_loop(session))
            session.broadcast(session.status_frame())
        return session.snapshot()

    @app.post("/sessions/{sid}/pause")
    async def pause_session(sid: str):
        session = get_session(sid)
        if session.status == "running":
            session.status = "paused"
            if session.task is not None:
                await session.task
                session.task = None
            session.broadcast(session.status_frame())
        return session.snapshot()

    @app.get("/sessions/{sid}/log")
    async def get_log(sid: str):
        session = get_session(sid)
        return {
            "commands": [{"t": t, "s": s} for t, s in session.command_log],
            "schedule": {
                "segments": _log_to_segments(session.command_log),
                "T": session.t,
            },
        }

    @app.get("/sessions/{sid}/trajectory")
    async def get_trajectory(sid: str):
        session = get_session(sid)
        return {
            "times": session.times,
            "s_values": session.s_samples,
            "states": [[float(v) for v in row] for row in session.states],
        }

    @app.get("/analyze")
    async def analyze(graph: str = Query(...)):
        try:
            report = analyze_source(graph)
        except (DclabError, OSError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return attach_presets(report)

    @app.websocket("/sessions/{sid}/stream")
    async def stream(ws: WebSocket, sid: str, rate: float = 30.0):
        await ws.accept()
        session = sessions.get(sid)
        if session is None:
            await ws.send_json({"type": "status", "status": "unknown-session"})
            await ws.close(code=4404)
            return
        rate = max(0.1, min(rate, 240.0))
        queue: asyncio.Queue = asyncio.Queue(maxsize=512)
        session.subscribers.append(queue)
        min_gap = 1.0 / rate
        last_state_sent = 0.0
        try:
            await ws.send_json(session.state_frame())
            while True:
                try:
                    frame = await asyncio.wait_for(queue.get(), timeout=1.0)
                except asyncio.TimeoutError:
                    await ws.send_json(session.status_frame())  # heartbeat
                    continue
                now = time.monotonic()
                if frame["type"] == "state":
                    if session.status == "running" and now - last_state_sent < min_gap:
                        continue
                    last_state_sent = now
                await ws.send_json(frame)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if queue in session.subscribers:
                session.subscribers.remove(queue)

    return app


def _log_to_segments(commands: list[tuple[float, float]]) -> list[list[float]]:
    """Collapse a command log into switching segments (drop no-op repeats)."""
    segments: list[list[float]] = []
    for t, s in commands:
        if segments and segments[-1][0] == t:
            segments[-1][1] = s
        elif not segments or segments[-1][1] != s:
            segments.append([t, s])
    return segments


app = create_app()
