"""Time-domain simulation: switched continuous protocol, discrete Perron
iteration, planar vehicle dynamics, predicted limits and oscillation fits.

Integration is classical fixed-step RK4.  Per switching segment the
one-step propagator ``Phi = I + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24`` of
the constant system ``xdot = M x`` is precomputed, so every sample is the
result of whole RK4 steps under a single s value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .errors import (
    DimensionMismatchError,
    EpsilonOutOfRangeError,
    FitDidNotConvergeError,
    StepMismatchError,
    WindowTooShortError,
)
from .graphs import Graph, deformed_laplacian, structure_probe
from .graphio import resolve_graph_source
from .qep import (
    ASYMPTOTICALLY_STABLE,
    MARGINALLY_STABLE,
    classify_at,
    marginal_mode,
)

__all__ = [
    "DIVERGENCE_LIMIT",
    "SwitchSchedule",
    "Trajectory",
    "PerronConfig",
    "PredictedLimit",
    "OscillationFit",
    "Scenario",
    "rk4_step_matrix",
    "integrate",
    "planar_sim",
    "discrete_run",
    "settle",
    "predicted_limit",
    "oscillation_fit",
    "trajectory_to_csv",
    "scenario_from_dict",
    "load_scenario",
    "run_scenario",
]

DIVERGENCE_LIMIT = 1e9
STEADY_TOL = 1e-9
STEADY_STEPS = 100


@dataclass(frozen=True)
class SwitchSchedule:
    """Piecewise-constant s(t): ordered (t_start, s) segments covering [0, T)."""

    segments: tuple[tuple[float, float], ...]
    total_time: float

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        segs = tuple((float(t), float(s)) for t, s in self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "total_time", float(self.total_time))
        if segs[0][0] != 0.0:
            raise ValueError("first segment must start at t=0")
        starts = [t for t, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly increasing")
        if starts[-1] >= self.total_time:
            raise ValueError("last segment must start before total_time")
        if any(not math.isfinite(s) for _, s in segs):
            raise ValueError("segment s values must be finite")

    @classmethod
    def constant(cls, s: float, total_time: float) -> "SwitchSchedule":
        return cls(segments=((0.0, float(s)),), total_time=total_time)

    def bounds(self):
        """Yield (t_start, t_end, s) triples."""
        starts = [t for t, _ in self.segments] + [self.total_time]
        for (t0, s), t1 in zip(self.segments, starts[1:]):
            yield t0, t1, s

    def s_at(self, t: float) -> float:
        current = self.segments[0][1]
        for t0, s in self.segments:
            if t >= t0:
                current = s
        return current


@dataclass
class Trajectory:
    """Uniformly sampled states of one simulation run."""

    times: np.ndarray
    states: np.ndarray  # (samples, dim)
    s_values: np.ndarray
    graph_id: str
    planar: bool = False
    status: str = "completed"  # completed | divergent
    converged_at: float | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class PerronConfig:
    """Discrete-time iteration x(k+1) = (I - eps * Delta(s)) x(k)."""

    epsilon: float
    s: float
    iterations: int


@dataclass(frozen=True)
class PredictedLimit:
    kind: str  # zero | limit | oscillation | divergent
    vector: np.ndarray | None = None
    oscillation: dict | None = None


@dataclass(frozen=True)
class OscillationFit:
    frequency: float
    amplitudes: np.ndarray
    phases: np.ndarray  # relative to vertex 1, wrapped to (-pi, pi]
    residual: float  # rms residual relative to the oscillatory signal content


def rk4_step_matrix(m: np.ndarray, dt: float) -> np.ndarray:
    """One-step propagator of classical RK4 applied to xdot = M x."""
    n = m.shape[0]
    eye = np.eye(n)
    hm = dt * m
    acc = eye / 6.0 + hm / 24.0
    acc = eye / 2.0 + hm @ acc
    acc = eye + hm @ acc
    return eye + hm @ acc


def _segment_steps(t0: float, t1: float, dt: float) -> int:
    length = t1 - t0
    steps = round(length / dt)
    if steps < 1 or abs(steps * dt - length) > 1e-9 * max(1.0, abs(length)):
        raise StepMismatchError(
            f"dt={dt} does not divide segment [{t0}, {t1}] of length {length}"
        )
    return steps


def _run_switched(system_matrices, schedule: SwitchSchedule, x0: np.ndarray, dt: float):
    """Shared stepping loop; system_matrices maps s -> M of xdot = M x."""
    dim = x0.shape[0]
    plan = [(t0, t1, s, _segment_steps(t0, t1, dt)) for t0, t1, s in schedule.bounds()]
    total_steps = sum(p[3] for p in plan)

    states = np.empty((total_steps + 1, dim))
    svals = np.empty(total_steps + 1)
    states[0] = x0
    svals[0] = plan[0][2]
    status = "completed"
    converged_at = None
    quiet = 0
    k = 0

    for _, _, s, steps in plan:
        m = system_matrices(s)
        phi = rk4_step_matrix(m, dt)
        for _ in range(steps):
            x = phi @ states[k]
            k += 1
            states[k] = x
            svals[k] = s
            if np.abs(x).max() > DIVERGENCE_LIMIT:
                status = "divergent"
                break
            if converged_at is None:
                if np.abs(m @ x).max() < STEADY_TOL:
                    quiet += 1
                    if quiet >= STEADY_STEPS:
                        converged_at = k * dt
                else:
                    quiet = 0
        if status == "divergent":
            break

    states = states[: k + 1]
    svals = svals[: k + 1]
    times = np.arange(k + 1) * dt
    return times, states, svals, status, converged_at


def integrate(g: Graph, schedule: SwitchSchedule, x0, dt: float) -> Trajectory:
    """Simulate xdot = -Delta(s(t)) x under a piecewise-constant schedule.

    dt must divide every segment length so switches land exactly on step
    boundaries.  Integration stops early with status "divergent" once
    ||x||_inf exceeds 1e9; ``converged_at`` records the first time the
    steady-state criterion (||xdot||_inf < 1e-9 for 100 consecutive steps)
    is met.
    """
    if dt <= 0:
        raise StepMismatchError(f"dt must be positive, got {dt}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise DimensionMismatchError(f"x0 must have dimension {g.n}, got {x0.shape}")
    times, states, svals, status, conv = _run_switched(
        lambda s: -deformed_laplacian(g, s), schedule, x0, dt
    )
    return Trajectory(times, states, svals, g.label(), False, status, conv)


def planar_sim(g: Graph, schedule: SwitchSchedule, p0, dt: float) -> Trajectory:
    """Simulate the planar closed loop pdot = (-Delta(s) kron I2) p.

    p0 is laid out [p1x, p1y, p2x, p2y, ...]; the dynamics factor into two
    independent copies of the scalar protocol, one per coordinate.
    """
    if dt <= 0:
        raise StepMismatchError(f"dt must be positive, got {dt}")
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (2 * g.n,):
        raise DimensionMismatchError(f"p0 must have dimension {2 * g.n}, got {p0.shape}")
    eye2 = np.eye(2)
    times, states, svals, status, conv = _run_switched(
        lambda s: np.kron(-deformed_laplacian(g, s), eye2), schedule, p0, dt
    )
    return Trajectory(times, states, svals, g.label(), True, status, conv)


def discrete_run(g: Graph, cfg: PerronConfig, x0) -> Trajectory:
    """Iterate the discrete map x(k+1) = (I - eps * Delta(s)) x(k).

    Requires 0 < eps < 1/d_max.  Sample times are the step indices.
    """
    d_max = structure_probe(g).max_degree
    if d_max < 1:
        raise EpsilonOutOfRangeError("graph has no edges; d_max undefined")
    if not 0.0 < cfg.epsilon < 1.0 / d_max:
        raise EpsilonOutOfRangeError(
            f"epsilon must lie in (0, 1/{d_max}), got {cfg.epsilon}"
        )
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise DimensionMismatchError(f"x0 must have dimension {g.n}, got {x0.shape}")

    perron = np.eye(g.n) - cfg.epsilon * deformed_laplacian(g, cfg.s)
    states = np.empty((cfg.iterations + 1, g.n))
    states[0] = x0
    status = "completed"
    converged_at = None
    quiet = 0
    k = 0
    for k in range(1, cfg.iterations + 1):
        states[k] = perron @ states[k - 1]
        if np.abs(states[k]).max() > DIVERGENCE_LIMIT:
            status = "divergent"
            break
        if converged_at is None:
            if np.abs(states[k] - states[k - 1]).max() < STEADY_TOL:
                quiet += 1
                if quiet >= STEADY_STEPS:
                    converged_at = float(k)
            else:
                quiet = 0
    states = states[: k + 1]
    times = np.arange(k + 1, dtype=float)
    svals = np.full(k + 1, cfg.s)
    return Trajectory(times, states, svals, g.label(), False, status, converged_at)


def settle(g: Graph, s: float, x0, max_time: float = 4000.0, deriv_tol: float = 1e-10):
    """Integrate xdot = -Delta(s) x until the state stops moving.

    Chooses a step size inside the RK4 stability region from the spectral
    norm of Delta(s) and runs without recording intermediate samples.
    Returns (final_state, converged_flag).  ``deriv_tol`` is the steady-state
    threshold on ||xdot||_inf; when s is only known approximately the zero
    eigenvalue is not exactly zero and the derivative plateaus near
    |lambda_0| * ||x||, so callers should loosen it accordingly.
    """
    x = np.asarray(x0, dtype=float).copy()
    m = -deformed_laplacian(g, s)
    rho = max(1e-6, float(np.linalg.norm(m, 2)))
    dt = min(0.02, 1.6 / rho)
    phi = rk4_step_matrix(m, dt)
    quiet = 0
    steps = int(max_time / dt)
    for _ in range(steps):
        x = phi @ x
        if np.abs(x).max() > DIVERGENCE_LIMIT:
            return x, False
        if np.abs(m @ x).max() < deriv_tol:
            quiet += 1
            if quiet >= 50:
                return x, True
        else:
            quiet = 0
    return x, False


def predicted_limit(g: Graph, s: float, x0) -> PredictedLimit:
    """Closed-form prediction of the t -> infinity behaviour at fixed s.

    Asymptotically stable values decay to zero; marginal values converge to
    projector @ x0 (limit formula) or, for a pure-imaginary pair, sustain a
    sinusoid whose per-vertex amplitudes and phases follow from the
    eigen-decomposition; unstable values are tagged divergent.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise DimensionMismatchError(f"x0 must have dimension {g.n}, got {x0.shape}")
    verdict = classify_at(g, s)
    if verdict == ASYMPTOTICALLY_STABLE:
        return PredictedLimit(kind="zero", vector=np.zeros(g.n))
    if verdict != MARGINALLY_STABLE:
        return PredictedLimit(kind="divergent")

    mode = marginal_mode(g, s)  # may raise MultiplicityAboveOneError
    if mode.kind != "oscillation":
        return PredictedLimit(kind="limit", vector=mode.projector @ x0)

    m = -deformed_laplacian(g, s)
    w, vl, vr = scipy.linalg.eig(m, left=True, right=True)
    rho = max(1.0, float(np.abs(w).max()))
    tol = 1e-7 * rho
    cand = [k for k in range(g.n) if abs(w[k].real) <= tol and w[k].imag > tol]
    k = max(cand, key=lambda i: w[i].imag)
    beta = float(w[k].imag)
    u = vr[:, k]
    denom = vl[:, k].conj() @ u
    c = (vl[:, k].conj() @ x0) / denom
    coeff = c * u  # x_k(t) ~ 2 Re[coeff_k e^{j beta t}]
    amplitudes = 2.0 * np.abs(coeff)
    phases = np.angle(coeff) + np.pi / 2  # sin convention: A sin(beta t + phi)
    phases = _wrap_phase(phases)
    return PredictedLimit(
        kind="oscillation",
        oscillation={
            "frequency": beta / (2 * np.pi),
            "amplitudes": amplitudes,
            "phases": phases,
        },
    )


def _wrap_phase(phi):
    """Wrap to (-pi, pi]."""
    wrapped = np.mod(np.asarray(phi) + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def oscillation_fit(traj: Trajectory, window: tuple[float, float]) -> OscillationFit:
    """Fit a single common frequency with per-vertex amplitude and phase.

    Model per vertex: x_k(t) = A_k sin(2 pi f t + phi_k) + c_k.  The
    frequency comes from an FFT seed refined by a bounded scalar
    minimization of the joint least-squares residual; phases are reported
    relative to vertex 1 in (-pi, pi].
    """
    t0, t1 = window
    times = traj.times
    if t0 < times[0] - 1e-12 or t1 > times[-1] + 1e-12 or t1 <= t0:
        raise WindowTooShortError(f"window ({t0}, {t1}) outside trajectory range")
    mask = (times >= t0 - 1e-12) & (times <= t1 + 1e-12)
    t = times[mask]
    x = traj.states[mask]
    if len(t) < 16:
        raise WindowTooShortError(f"only {len(t)} samples in window; need >= 16")

    centred = x - x.mean(axis=0)
    spread = centred.std(axis=0)
    if spread.max() < 1e-12:
        raise FitDidNotConvergeError("trajectory is constant over the window")

    dt_sample = t[1] - t[0]
    lead = centred[:, int(np.argmax(spread))]
    spectrum = np.abs(np.fft.rfft(lead))
    spectrum[0] = 0.0
    peak = int(np.argmax(spectrum))
    if peak == 0 or spectrum[peak] < 1e-12:
        raise FitDidNotConvergeError("no dominant frequency in window")
    freqs = np.fft.rfftfreq(len(lead), d=dt_sample)
    f_seed = freqs[peak]
    bin_width = freqs[1]

    def fit_residual(f: float) -> float:
        basis = np.column_stack(
            [np.cos(2 * np.pi * f * t), np.sin(2 * np.pi * f * t), np.ones_like(t)]
        )
        _, rss, _, _ = np.linalg.lstsq(basis, x, rcond=None)
        if len(rss) == 0:
            proj = basis @ np.linalg.lstsq(basis, x, rcond=None)[0]
            return float(np.sum((x - proj) ** 2))
        return float(np.sum(rss))

    lo = max(f_seed - 2 * bin_width, 0.25 * bin_width)
    hi = f_seed + 2 * bin_width
    res = minimize_scalar(
        fit_residual, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    f_star = float(res.x)

    basis = np.column_stack(
        [np.cos(2 * np.pi * f_star * t), np.sin(2 * np.pi * f_star * t), np.ones_like(t)]
    )
    coef, _, _, _ = np.linalg.lstsq(basis, x, rcond=None)
    a, b = coef[0], coef[1]
    amplitudes = np.hypot(a, b)
    phases = np.arctan2(a, b)  # a cos + b sin = A sin(theta + phi)
    rel_phases = _wrap_phase(phases - phases[0])

    residual_rms = float(np.sqrt(np.mean((x - basis @ coef) ** 2)))
    signal_rms = float(np.sqrt(np.mean(centred**2)))
    rel_residual = residual_rms / max(signal_rms, 1e-300)
    if rel_residual > 0.25:
        raise FitDidNotConvergeError(
            f"single-frequency model leaves {rel_residual:.1%} relative residual"
        )
    return OscillationFit(
        frequency=f_star,
        amplitudes=amplitudes,
        phases=rel_phases,
        residual=rel_residual,
    )


# ---------------------------------------------------------------------------
# trajectory / scenario files
# ---------------------------------------------------------------------------

def trajectory_to_csv(traj: Trajectory, path: str | Path) -> None:
    """Write time,s,x1..xn (or time,s,p1x,p1y,...) rows."""
    dim = traj.states.shape[1]
    if traj.planar:
        labels = [f"p{i}{axis}" for i in range(1, dim // 2 + 1) for axis in ("x", "y")]
    else:
        labels = [f"x{i}" for i in range(1, dim + 1)]
    header = ",".join(["time", "s"] + labels)
    data = np.column_stack([traj.times, traj.s_values, traj.states])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


@dataclass(frozen=True)
class Scenario:
    """A simulation request: graph, schedule, initial state, step size."""

    graph: Graph
    schedule: SwitchSchedule
    x0: np.ndarray
    dt: float
    planar: bool
    name: str | None = None


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        graph = resolve_graph_source(doc["graph"])
        segments = tuple((float(t), float(s)) for t, s in doc["schedule"])
        schedule = SwitchSchedule(segments=segments, total_time=float(doc["T"]))
        x0 = np.asarray(doc["x0"], dtype=float)
        dt = float(doc["dt"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed scenario: {exc}") from exc
    if x0.ndim != 1:
        raise DimensionMismatchError("x0 must be a flat list")
    if len(x0) == graph.n:
        planar = False
    elif len(x0) == 2 * graph.n:
        planar = True
    else:
        raise DimensionMismatchError(
            f"x0 length {len(x0)} matches neither n={graph.n} nor 2n={2 * graph.n}"
        )
    return Scenario(graph, schedule, x0, dt, planar, doc.get("name"))


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def run_scenario(sc: Scenario) -> Trajectory:
    if sc.planar:
        return planar_sim(sc.graph, sc.schedule, sc.x0, sc.dt)
    return integrate(sc.graph, sc.schedule, sc.x0, sc.dt)
