"""General-topology s-stability analysis via quadratic-eigenvalue machinery.

The deformed consensus system is marginally stable exactly at the finite
real eigenvalues of the quadratic problem ``((I - D) l^2 + A l - I) z = 0``;
for undirected connected graphs the sign of ``q(s) = det((I-D)s^2 + As - I)``
classifies every non-marginal s (n even: q > 0 stable; n odd: q < 0
stable).  Digraphs that admit stable periodic solutions escape the sign
rule and are handled by a classification sweep instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .errors import (
    DisconnectedError,
    EigensolverError,
    IllConditionedInterpolationError,
    MultiplicityAboveOneError,
    NoBracketError,
    NotMarginalError,
    NotUndirectedError,
    ZeroOffdiagonalError,
    ZeroVectorError,
)
from .graphs import Graph, deformed_laplacian, matrices, structure_probe

__all__ = [
    "ASYMPTOTICALLY_STABLE",
    "MARGINALLY_STABLE",
    "UNSTABLE",
    "QepResult",
    "MarginalMode",
    "StabilityReport",
    "qep_solve",
    "residual",
    "q_poly",
    "stability_intervals",
    "classify_at",
    "marginal_mode",
    "sturm_negative_count",
    "sweep_threshold",
    "max_spectrum_real_part",
    "report_to_dict",
]

ASYMPTOTICALLY_STABLE = "asymptotically-stable"
MARGINALLY_STABLE = "marginally-stable"
UNSTABLE = "unstable"

#: generalized eigenvalues beyond either cutoff count as infinite
INFINITY_MODULUS_CUTOFF = 1e8
BETA_CUTOFF = 1e-12

#: |Re lambda| below 1e-7 * max(1, spectral radius) counts as zero real part
MARGINALITY_RTOL = 1e-7

#: eigenvector components equal within this (after max-norm scaling) share a group
GROUPING_TOL = 1e-6


@dataclass(frozen=True)
class QepResult:
    """Finite/infinite eigenvalue split of the quadratic eigenvalue problem."""

    finite_eigenvalues: tuple[complex, ...]
    infinite_count: int
    right_eigenvectors: np.ndarray  # n x len(finite_eigenvalues)
    degree_r: int


@dataclass(frozen=True)
class MarginalMode:
    """What the system converges to (or does) at a marginally stable s."""

    s_star: float
    kind: str  # clusters | average-consensus | bipartite-consensus | oscillation
    zero_eigvec: np.ndarray | None
    projector: np.ndarray | None
    groups: tuple[tuple[int, ...], ...] | None
    oscillation: dict | None  # {frequency, amplitudes, phases}


@dataclass(frozen=True)
class StabilityReport:
    """Partition of the s-line into stable / unstable regions plus marginal points."""

    graph: str
    method: str  # closed-form | qep-sign-rule | sweep
    stable: tuple[tuple[float, float], ...]
    unstable: tuple[tuple[float, float], ...]
    marginal: tuple[MarginalMode, ...]
    q_coefficients: tuple[float, ...] | None = None


# ---------------------------------------------------------------------------
# QEP solve
# ---------------------------------------------------------------------------

def qep_solve(g: Graph) -> QepResult:
    """Solve ((I - D) l^2 + A l - I) z = 0 through the 2n x 2n linearization.

    The pencil is ``[[0, I], [I, -A]] zt = l [[I, 0], [0, I - D]] zt`` with
    ``zt = [z; l z]``; generalized eigenvalues whose beta parameter is tiny
    or whose modulus exceeds the infinity cutoff are classified infinite,
    and z is recovered from the leading n components.
    """
    bundle = matrices(g)
    n = g.n
    eye = np.eye(n)
    zero = np.zeros((n, n))
    pa = np.block([[zero, eye], [eye, -bundle.A]])
    pb = np.block([[eye, zero], [zero, eye - bundle.D]])
    try:
        (alpha, beta), vr = scipy.linalg.eig(
            pa, pb, homogeneous_eigvals=True, right=True
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"generalized eigensolver failed: {exc}") from exc

    finite: list[complex] = []
    vectors: list[np.ndarray] = []
    for k in range(2 * n):
        if abs(beta[k]) < BETA_CUTOFF:
            continue
        lam = complex(alpha[k] / beta[k])
        if abs(lam) > INFINITY_MODULUS_CUTOFF:
            continue
        z = vr[:n, k]
        nz = np.linalg.norm(z)
        if nz < 1e-12:
            # z block degenerate; fall back to w = l z
            z = vr[n:, k]
            nz = np.linalg.norm(z)
            if nz < 1e-12 or lam == 0:
                continue
            z = z / lam
            nz = np.linalg.norm(z)
        finite.append(lam)
        vectors.append(z / nz)

    vec_arr = np.array(vectors).T if vectors else np.zeros((n, 0), dtype=complex)
    return QepResult(
        finite_eigenvalues=tuple(finite),
        infinite_count=2 * n - len(finite),
        right_eigenvectors=vec_arr,
        degree_r=len(finite),
    )


def residual(g: Graph, lam: complex, z) -> float:
    """Relative residual ||((I-D) l^2 + A l - I) z|| / ||z||."""
    z = np.asarray(z, dtype=complex)
    nz = np.linalg.norm(z)
    if nz == 0.0:
        raise ZeroVectorError("residual needs a nonzero vector")
    bundle = matrices(g)
    eye = np.eye(g.n)
    pmat = (eye - bundle.D) * lam**2 + bundle.A * lam - eye
    return float(np.linalg.norm(pmat @ z) / nz)


# ---------------------------------------------------------------------------
# determinant polynomial
# ---------------------------------------------------------------------------

def q_poly(g: Graph) -> np.ndarray:
    """Coefficients (low to high) of q(s) = det((I-D)s^2 + As - I).

    Recovered by evaluating det(-Delta(s)) at 2n+1 Chebyshev points in
    [-2, 2] and interpolating; trailing coefficients below 1e-8 of the
    largest are trimmed so the length exposes the true degree r.
    """
    n = g.n
    deg = 2 * n
    npts = deg + 1
    u = np.cos(np.pi * (2 * np.arange(npts) + 1) / (2 * npts))  # Chebyshev, on [-1,1]
    nodes = 2.0 * u
    vals = np.array([np.linalg.det(-deformed_laplacian(g, s)) for s in nodes])
    if not np.all(np.isfinite(vals)) or np.abs(vals).max() > 1e250:
        raise IllConditionedInterpolationError(
            f"determinant range too large for interpolation on {g.label()}"
        )
    cheb_coef = np.polynomial.chebyshev.chebfit(u, vals, deg)
    power_u = np.polynomial.chebyshev.cheb2poly(cheb_coef)
    coef = power_u / (2.0 ** np.arange(len(power_u)))  # substitute u = s/2

    cut = 1e-8 * np.abs(coef).max()
    r = len(coef) - 1
    while r > 0 and abs(coef[r]) < cut:
        r -= 1
    coef = np.array(coef[: r + 1])
    coef[np.abs(coef) < 1e-10 * np.abs(coef).max()] = 0.0  # interior rounding noise

    probe = np.array([-1.57, -0.63, 0.41, 1.73])
    ref = np.array([np.linalg.det(-deformed_laplacian(g, s)) for s in probe])
    approx = np.polynomial.polynomial.polyval(probe, coef)
    if np.abs(approx - ref).max() > 1e-6 * max(1.0, np.abs(ref).max()):
        raise IllConditionedInterpolationError(
            f"interpolated q(s) does not reproduce determinants on {g.label()}"
        )
    return coef


# ---------------------------------------------------------------------------
# pointwise classification
# ---------------------------------------------------------------------------

def _spectrum(g: Graph, s: float) -> np.ndarray:
    m = -deformed_laplacian(g, s)
    try:
        if g.directed:
            return np.linalg.eigvals(m)
        return np.linalg.eigvalsh(m).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolve failed at s={s}: {exc}") from exc


def max_spectrum_real_part(g: Graph, s: float) -> float:
    """Largest real part over the spectrum of -Delta(s)."""
    return float(_spectrum(g, s).real.max())


def _cluster_complex(values, tol):
    """Greedy clustering of complex values; returns (center, count) pairs."""
    clusters: list[list[complex]] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if clusters and abs(v - clusters[-1][0]) <= tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [(np.mean(c), len(c)) for c in clusters]


def classify_at(g: Graph, s: float) -> str:
    """Classify s as asymptotically-stable, marginally-stable, or unstable.

    Marginal means the extremal real part sits within the scale-free
    tolerance of zero and every zero-real-part eigenvalue is semisimple
    (automatic for undirected graphs; checked via rank deficiency for
    digraphs).
    """
    w = _spectrum(g, s)
    rho = max(1.0, float(np.abs(w).max()))
    tol = MARGINALITY_RTOL * rho
    mx = float(w.real.max())
    if mx < -tol:
        return ASYMPTOTICALLY_STABLE
    if mx > tol:
        return UNSTABLE
    if not g.directed:
        return MARGINALLY_STABLE
    m = -deformed_laplacian(g, s)
    norm_m = max(1.0, float(np.linalg.norm(m, 2)))
    critical = w[np.abs(w.real) <= tol]
    for lam0, alg in _cluster_complex(critical, tol):
        sv = np.linalg.svd(m - lam0 * np.eye(g.n), compute_uv=False)
        geo = int(np.sum(sv <= 1e-9 * norm_m))
        if geo < alg:
            return UNSTABLE
    return MARGINALLY_STABLE


# ---------------------------------------------------------------------------
# marginal modes
# ---------------------------------------------------------------------------

def _group_components(z: np.ndarray) -> tuple[tuple[tuple[int, ...], ...], list[float]]:
    """Cluster eigenvector components after scaling max |component| to 1."""
    scaled = z / np.abs(z).max()
    order = np.argsort(scaled)
    groups: list[list[int]] = [[int(order[0]) + 1]]
    reps: list[float] = [float(scaled[order[0]])]
    for idx in order[1:]:
        val = float(scaled[idx])
        if abs(val - reps[-1]) <= GROUPING_TOL:
            groups[-1].append(int(idx) + 1)
        else:
            groups.append([int(idx) + 1])
            reps.append(val)
    return tuple(tuple(sorted(grp)) for grp in groups), reps


def _mode_kind(groups, reps, projector: np.ndarray, n: int) -> str:
    if len(groups) == 1:
        mean_proj = np.full((n, n), 1.0 / n)
        if np.abs(projector - mean_proj).max() <= 1e-8:
            return "average-consensus"
        return "clusters"
    if len(groups) == 2 and abs(reps[0] + reps[1]) <= GROUPING_TOL:
        return "bipartite-consensus"
    return "clusters"


def marginal_mode(g: Graph, s_star: float) -> MarginalMode:
    """Limit behaviour at a marginally stable parameter value.

    For a semisimple real zero eigenvalue of -Delta(s*) with geometric
    multiplicity one: the unit kernel vector, the limit projector (outer
    product for undirected graphs, right/left-eigenvector product
    normalized to u.v = 1 for digraphs), and the vertex grouping by
    eigenvector components.  A pure-imaginary pair instead yields an
    oscillation descriptor with frequency |Im|/(2 pi).
    """
    verdict = classify_at(g, s_star)
    if verdict != MARGINALLY_STABLE:
        raise NotMarginalError(f"{g.label()} at s={s_star:.6g} is {verdict}")

    delta = deformed_laplacian(g, s_star)
    n = g.n

    if not g.directed:
        w, vecs = np.linalg.eigh(delta)
        rho = max(1.0, float(np.abs(w).max()))
        tol = MARGINALITY_RTOL * rho
        zero_idx = np.where(np.abs(w) <= tol)[0]
        if len(zero_idx) > 1:
            partial = MarginalMode(s_star, "clusters", None, None, None, None)
            raise MultiplicityAboveOneError(
                f"zero eigenvalue of Delta({s_star:.6g}) has multiplicity {len(zero_idx)}",
                mode=partial,
            )
        z = vecs[:, zero_idx[0]]
        z = z / np.linalg.norm(z)
        if z[int(np.argmax(np.abs(z)))] < 0:
            z = -z
        projector = np.outer(z, z)
        groups, reps = _group_components(z)
        return MarginalMode(
            s_star, _mode_kind(groups, reps, projector, n), z, projector, groups, None
        )

    w = np.linalg.eigvals(-delta)
    rho = max(1.0, float(np.abs(w).max()))
    tol = MARGINALITY_RTOL * rho
    has_zero = bool(np.any(np.abs(w) <= tol))

    if has_zero:
        u_svd, sv, vh = np.linalg.svd(delta)
        norm_d = max(1.0, float(sv[0]))
        geo = int(np.sum(sv <= 1e-9 * norm_d))
        if geo != 1:
            partial = MarginalMode(s_star, "clusters", None, None, None, None)
            raise MultiplicityAboveOneError(
                f"kernel of Delta({s_star:.6g}) has dimension {geo}", mode=partial
            )
        u = vh[-1]
        if u[int(np.argmax(np.abs(u)))] < 0:
            u = -u
        y = u_svd[:, -1]
        c = float(y @ u)
        if abs(c) < 1e-12:
            partial = MarginalMode(s_star, "clusters", u, None, None, None)
            raise MultiplicityAboveOneError(
                "left/right kernel vectors nearly orthogonal; limit projector undefined",
                mode=partial,
            )
        v = y / c
        projector = np.outer(u, v)
        groups, reps = _group_components(u)
        return MarginalMode(
            s_star, _mode_kind(groups, reps, projector, n), u, projector, groups, None
        )

    # pure-imaginary pair: steady oscillation
    wv, vecs = np.linalg.eig(-delta)
    cand = [k for k in range(n) if abs(wv[k].real) <= tol and wv[k].imag > tol]
    k = max(cand, key=lambda i: wv[i].imag)
    beta = float(wv[k].imag)
    u = vecs[:, k]
    amps = np.abs(u)
    amps = amps / amps.max()
    phases = np.angle(u * np.conj(u[0]))
    osc = {
        "frequency": beta / (2 * np.pi),
        "amplitudes": amps,
        "phases": phases,
    }
    return MarginalMode(s_star, "oscillation", None, None, None, osc)


# ---------------------------------------------------------------------------
# stability intervals (undirected sign rule)
# ---------------------------------------------------------------------------

def _polish_marginal_point(g: Graph, s0: float, radius: float = 5e-3):
    """Refine a root candidate against the spectrum of Delta(s).

    The signed eigenvalue of smallest modulus crosses zero at simple roots
    (bisected to machine precision); even-multiplicity roots only touch
    zero and are located by minimizing its modulus instead.
    """

    def smallest_eig(s: float) -> float:
        w = np.linalg.eigvalsh(deformed_laplacian(g, s))
        return float(w[np.argmin(np.abs(w))])

    f_lo, f_hi = smallest_eig(s0 - radius), smallest_eig(s0 + radius)
    if f_lo * f_hi < 0:
        from scipy.optimize import brentq

        s_star = brentq(smallest_eig, s0 - radius, s0 + radius, xtol=1e-14, rtol=8.9e-16)
        return float(s_star), abs(smallest_eig(s_star))

    res = minimize_scalar(
        lambda s: abs(smallest_eig(s)),
        bounds=(s0 - radius, s0 + radius),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x), float(res.fun)


def stability_intervals(g: Graph) -> StabilityReport:
    """Partition the whole s-line for a connected undirected graph.

    The real roots of q(s) are the marginal candidates; every open interval
    between consecutive roots is classified by the parity sign rule (n
    even: q > 0 stable, n odd: q < 0 stable).  Roots are polished against
    the spectrum of Delta(s) so reported endpoints are accurate to ~1e-8
    even for even-multiplicity roots.
    """
    if g.directed:
        raise NotUndirectedError(
            "sign rule applies to undirected graphs; use sweep_threshold/classify_at"
        )
    if not structure_probe(g).connected:
        raise DisconnectedError(f"{g.label()} is not connected")

    coef = q_poly(g)
    roots = np.polynomial.Polynomial(coef).roots()
    candidates = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-3)

    norm_scale = max(1.0, float(np.linalg.norm(deformed_laplacian(g, 1.0), 2)))
    polished: list[float] = []
    for c in candidates:
        if polished and abs(c - polished[-1]) <= 1e-4:
            continue
        s_star, fval = _polish_marginal_point(g, c)
        if fval > 1e-6 * norm_scale:
            continue  # spurious near-real root of the interpolant
        if polished and abs(s_star - polished[-1]) <= 1e-7:
            continue
        polished.append(s_star)

    marginal_points = sorted(polished)
    n_even = g.n % 2 == 0

    def classify_interval(lo: float, hi: float) -> str:
        if np.isinf(lo):
            mid = hi - 1.0
        elif np.isinf(hi):
            mid = lo + 1.0
        else:
            mid = 0.5 * (lo + hi)
        qval = float(np.polynomial.polynomial.polyval(mid, coef))
        stable = qval > 0 if n_even else qval < 0
        return "stable" if stable else "unstable"

    breakpoints = [float("-inf")] + marginal_points + [float("inf")]
    stable: list[tuple[float, float]] = []
    unstable: list[tuple[float, float]] = []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        (stable if classify_interval(lo, hi) == "stable" else unstable).append((lo, hi))

    modes: list[MarginalMode] = []
    for s_star in marginal_points:
        try:
            modes.append(marginal_mode(g, s_star))
        except MultiplicityAboveOneError as exc:
            modes.append(exc.mode or MarginalMode(s_star, "clusters", None, None, None, None))

    return StabilityReport(
        graph=g.label(),
        method="qep-sign-rule",
        stable=tuple(stable),
        unstable=tuple(unstable),
        marginal=tuple(modes),
        q_coefficients=tuple(float(c) for c in coef),
    )


# ---------------------------------------------------------------------------
# Sturm counting
# ---------------------------------------------------------------------------

def sturm_negative_count(diag, offdiag) -> int:
    """Number of negative eigenvalues of a symmetric tridiagonal matrix.

    Counts sign changes along the leading-principal-minor sequence
    ``1, det(T1), ..., det(Tn)``; a change is a transition from + or 0 to
    -, or from - or 0 to +, never from +/- to 0.  Off-diagonal entries must
    be nonzero.
    """
    a = [float(x) for x in diag]
    b = [float(x) for x in offdiag]
    if len(b) != max(0, len(a) - 1):
        raise ValueError(f"need {len(a) - 1} off-diagonal entries, got {len(b)}")
    if any(x == 0.0 for x in b):
        raise ZeroOffdiagonalError("off-diagonal entries must be nonzero")

    seq = [1.0]
    prev2, prev = 0.0, 1.0  # det(T_{-1}) unused for r=1; det(T_0) = 1
    for r, ar in enumerate(a):
        cur = ar * prev - (b[r - 1] ** 2) * prev2 if r > 0 else ar
        seq.append(cur)
        prev2, prev = prev, cur
        if abs(prev) > 1e150 or abs(prev2) > 1e150:  # rescaling keeps signs intact
            prev *= 2.0**-512
            prev2 *= 2.0**-512

    changes = 0
    for before, after in zip(seq[:-1], seq[1:]):
        if after < 0 and before >= 0:
            changes += 1
        elif after > 0 and before <= 0:
            changes += 1
    return changes


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def sweep_threshold(g: Graph, s_lo: float, s_hi: float, coarse_step: float = 0.05) -> float:
    """Bisect the sign change of the extremal spectral real part on [s_lo, s_hi].

    The endpoints must classify differently (one side stable, the other
    not); a coarse scan locates the first crossing, bisection then refines
    it well below the 1e-6 contract.
    """
    if not s_lo < s_hi:
        raise NoBracketError(f"empty sweep interval [{s_lo}, {s_hi}]")
    f_lo = max_spectrum_real_part(g, s_lo)
    f_hi = max_spectrum_real_part(g, s_hi)
    if f_lo == 0.0:
        return s_lo
    if f_hi == 0.0:
        return s_hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoBracketError(
            f"both ends classify identically (f({s_lo})={f_lo:.3g}, f({s_hi})={f_hi:.3g})"
        )

    lo, flo = s_lo, f_lo
    s = s_lo + coarse_step
    hi, fhi = s_hi, f_hi
    while s < s_hi:
        f = max_spectrum_real_part(g, s)
        if f == 0.0:
            return s
        if np.sign(flo) != np.sign(f):
            hi, fhi = s, f
            break
        lo, flo = s, f
        s += coarse_step

    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        f = max_spectrum_real_part(g, mid)
        if f == 0.0:
            return mid
        if np.sign(f) == np.sign(flo):
            lo, flo = mid, f
        else:
            hi, fhi = mid, f
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _encode_endpoint(x: float):
    if x == float("inf"):
        return "+inf"
    if x == float("-inf"):
        return "-inf"
    return x


def report_to_dict(report: StabilityReport) -> dict:
    """StabilityReport as a JSON-ready dict; infinite endpoints become \"+/-inf\"."""
    marginal = []
    for m in report.marginal:
        entry: dict = {"s": m.s_star, "kind": m.kind}
        if m.groups is not None:
            entry["groups"] = [list(grp) for grp in m.groups]
        if m.oscillation is not None:
            entry["frequency"] = float(m.oscillation["frequency"])
        marginal.append(entry)
    out = {
        "graph": report.graph,
        "method": report.method,
        "stable": [[_encode_endpoint(lo), _encode_endpoint(hi)] for lo, hi in report.stable],
        "unstable": [[_encode_endpoint(lo), _encode_endpoint(hi)] for lo, hi in report.unstable],
        "marginal": marginal,
    }
    if report.q_coefficients is not None:
        out["q_coefficients"] = list(report.q_coefficients)
    return out
