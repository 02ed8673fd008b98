"""Closed-form spectra and stability verdicts for the named graph families.

All eigenvalues reported here are those of the negated deformed Laplacian
``-Delta(s)``; a value of s is asymptotically stable when every eigenvalue
has negative real part, marginal when the extremal real part is exactly
zero.  Regions are open intervals of the s-line; +/-inf endpoints denote
unbounded regions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterOutOfRangeError, RootNotBracketedError
from .graphs import (
    GraphFamily,
    deformed_laplacian,
    generate_family,
    hypercube_adjacency_eigenvalues,
)

__all__ = [
    "ClosedFormSpectrum",
    "FamilyStability",
    "family_spectrum",
    "family_stability",
    "wheel_mu",
    "directed_cycle_oscillation",
    "POS_INF",
    "NEG_INF",
]

POS_INF = float("inf")
NEG_INF = float("-inf")

#: marginal-mode tags used in family stability tables
MODE_AVERAGE = "average-consensus"
MODE_TWO_GROUPS = "two-groups"
MODE_K_GROUPS = "k-groups"
MODE_CONSENSUS_X1 = "consensus-on-x1"
MODE_OSCILLATION = "stable-oscillation"


@dataclass(frozen=True)
class ClosedFormSpectrum:
    """Spectrum of -Delta(s) for one family instance at one s value."""

    family: GraphFamily
    s: float
    eigenvalues: tuple[complex, ...]  # length n, repeated per multiplicity
    provenance: str  # "closed-form" | "numeric"

    def multiplicities(self, tol: float = 1e-7) -> list[tuple[complex, int]]:
        """Group the eigenvalue list into (value, multiplicity) pairs.

        Formula-derived spectra group exactly equal values; numeric spectra
        cluster within ``tol``.
        """
        groups: list[tuple[complex, int]] = []
        eff_tol = 0.0 if self.provenance == "closed-form" else tol
        for lam in sorted(self.eigenvalues, key=lambda z: (z.real, z.imag)):
            if groups and abs(lam - groups[-1][0]) <= eff_tol:
                groups[-1] = (groups[-1][0], groups[-1][1] + 1)
            else:
                groups.append((lam, 1))
        return groups


@dataclass(frozen=True)
class FamilyStability:
    """Stable/unstable regions and marginal points of a family instance."""

    family: GraphFamily
    stable: tuple[tuple[float, float], ...]
    unstable: tuple[tuple[float, float], ...]
    marginal: tuple[tuple[float, str], ...]  # (s*, mode tag)


def wheel_mu(n: int) -> float:
    """Non-unitary root of the wheel's extremal eigenvalue, in (0, 1/2].

    The extremal eigenvalue of -Delta(s) for the wheel on n vertices is
    ``-(n/2)s^2 + s + (s/2)sqrt(((n-4)s+2)^2 + 4(n-1)) - 1``; it vanishes
    at s=1 and at mu, and mu decreases monotonically from 1/2 (n=4)
    towards 0.
    """
    if n <= 3:
        raise ParameterOutOfRangeError(f"wheel needs n > 3, got {n}")

    def lam1(s: float) -> float:
        root = math.sqrt(((n - 4) * s + 2) ** 2 + 4 * (n - 1))
        return -(n / 2) * s**2 + s + 0.5 * root * s - 1.0

    lo, hi = 1e-9, 0.5 + 1e-9
    flo, fhi = lam1(lo), lam1(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise RootNotBracketedError(f"no sign change of wheel eigenvalue on ({lo}, {hi})")
    mu = brentq(lam1, lo, hi, xtol=1e-14, rtol=8.9e-16)
    # Newton polish; the derivative is well-behaved away from s=0
    for _ in range(4):
        h = 1e-7
        deriv = (lam1(mu + h) - lam1(mu - h)) / (2 * h)
        if deriv == 0:
            break
        step = lam1(mu) / deriv
        mu -= step
        if abs(step) < 1e-15:
            break
    if abs(lam1(mu)) > 1e-10:
        raise RootNotBracketedError(f"wheel root polish failed at n={n}")
    return mu


def directed_cycle_oscillation(n: int) -> dict:
    """Oscillation constants of the odd directed cycle.

    Returns the marginal parameter ``theta = 1/cos((n(n-2)+1)pi/n)``, the
    steady-state frequency ``tan((n(n-2)+1)pi/n)/(2 pi)`` and the nominal
    per-vertex phases ``2 pi (i-1) / (n tan((n(n-2)+1)pi/n))``.  The phase
    formula is reported verbatim; empirical phases of a simulated run come
    from :func:`dclab.dynamics.oscillation_fit`.
    """
    if n <= 2 or n % 2 == 0:
        raise ParameterOutOfRangeError(f"odd directed cycle needs odd n > 2, got {n}")
    angle = (n * (n - 2) + 1) * math.pi / n
    theta = 1.0 / math.cos(angle)
    tangent = math.tan(angle)
    frequency = tangent / (2 * math.pi)
    phases = [2 * math.pi * (i - 1) / (n * tangent) for i in range(1, n + 1)]
    return {"theta": theta, "frequency": frequency, "phases": phases}


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def _bipartite_branch_eigenvalues(m: int, n: int, s: float) -> list[complex]:
    """The two extremal eigenvalues of -Delta(s) for the complete bipartite
    graph K_{m,n} (valid for m >= 1), plus the two constant parabola groups."""
    root = math.sqrt((n - m) ** 2 * s**2 + 4 * m * n)
    lam1 = -(n + m - 2) / 2 * s**2 + 0.5 * root * s - 1.0
    lam2 = -(n + m - 2) / 2 * s**2 - 0.5 * root * s - 1.0
    eigs: list[complex] = [lam1, lam2]
    eigs += [-((m - 1) * s**2 + 1.0)] * (n - 1)
    eigs += [-((n - 1) * s**2 + 1.0)] * (m - 1)
    return eigs


def family_spectrum(fam: GraphFamily, s: float) -> ClosedFormSpectrum:
    """Eigenvalues of -Delta(s) for a family instance.

    Uses the circulant representer for cycles and directed cycles, the
    regular-graph identity for hypercube/Petersen/complete, the explicit
    two-branch formulas for wheel and (complete) bipartite graphs, and the
    triangular diagonal for directed paths.  Path and full m-ary tree have
    no published closed form: those fall back to a dense symmetric
    eigensolve and are flagged ``provenance="numeric"``.
    """
    from .graphs import _validate_family  # reuse range checks

    _validate_family(fam)
    k, p = fam.kind, fam.params
    eigs: list[complex]

    if k == "cycle":
        n = p[0]
        eigs = [
            -(s**2) + 2 * math.cos(2 * math.pi * i / n) * s - 1.0 for i in range(n)
        ]
    elif k == "wheel":
        n = p[0]
        root = math.sqrt(((n - 4) * s + 2) ** 2 + 4 * (n - 1))
        eigs = [
            -(n / 2) * s**2 + s + 0.5 * root * s - 1.0,
            -(n / 2) * s**2 + s - 0.5 * root * s - 1.0,
        ]
        eigs += [
            -2 * s**2 + 2 * math.cos(2 * math.pi * i / (n - 1)) * s - 1.0
            for i in range(1, n - 1)
        ]
    elif k == "hypercube":
        m = p[0]
        eigs = []
        for val, mult in hypercube_adjacency_eigenvalues(m):
            eigs += [-(m - 1) * s**2 + val * s - 1.0] * mult
    elif k == "petersen":
        eigs = []
        for val, mult in [(3, 1), (1, 5), (-2, 4)]:
            eigs += [-2 * s**2 + val * s - 1.0] * mult
    elif k == "complete":
        n = p[0]
        eigs = [-(n - 2) * s**2 + (n - 1) * s - 1.0]
        eigs += [-(n - 2) * s**2 - s - 1.0] * (n - 1)
    elif k == "bipartite":
        eigs = _bipartite_branch_eigenvalues(p[0], p[1], s)
    elif k == "star":
        eigs = _bipartite_branch_eigenvalues(1, p[0], s)
    elif k == "directed-path":
        n = p[0]
        eigs = [s**2 - 1.0] + [-1.0] * (n - 1)
    elif k == "directed-cycle":
        n = p[0]
        eigs = [
            s * cmath.exp(2j * math.pi * i * (n - 1) / n) - 1.0 for i in range(n)
        ]
    elif k in ("path", "mtree"):
        g = generate_family(fam)
        eigs = [complex(v) for v in np.linalg.eigvalsh(-deformed_laplacian(g, s))]
        return ClosedFormSpectrum(
            family=fam, s=s, eigenvalues=tuple(eigs), provenance="numeric"
        )
    else:
        raise AssertionError(k)

    return ClosedFormSpectrum(
        family=fam,
        s=s,
        eigenvalues=tuple(complex(v) for v in eigs),
        provenance="closed-form",
    )


# ---------------------------------------------------------------------------
# stability tables
# ---------------------------------------------------------------------------

def family_stability(fam: GraphFamily) -> FamilyStability:
    """Stable/unstable s-regions and marginal points of a family instance.

    Symbolic thresholds are evaluated numerically: 1/(n-2) for complete
    graphs, 1/(m-1) for hypercubes, 1/sqrt((m-1)(n-1)) for complete
    bipartite graphs, the wheel root mu, and theta(n) for odd directed
    cycles.  s=1 is marginal for every family (average consensus for
    undirected connected and balanced directed instances; consensus on the
    first vertex's initial value for directed paths).
    """
    from .graphs import _validate_family

    _validate_family(fam)
    k, p = fam.kind, fam.params

    if k in ("path", "mtree", "star"):
        return FamilyStability(
            family=fam,
            stable=((-1.0, 1.0),),
            unstable=((NEG_INF, -1.0), (1.0, POS_INF)),
            marginal=((-1.0, MODE_TWO_GROUPS), (1.0, MODE_AVERAGE)),
        )
    if k == "cycle":
        n = p[0]
        if n % 2 == 0:
            return FamilyStability(
                family=fam,
                stable=((NEG_INF, -1.0), (-1.0, 1.0), (1.0, POS_INF)),
                unstable=(),
                marginal=((-1.0, MODE_TWO_GROUPS), (1.0, MODE_AVERAGE)),
            )
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, 1.0), (1.0, POS_INF)),
            unstable=(),
            marginal=((1.0, MODE_AVERAGE),),
        )
    if k == "wheel":
        n = p[0]
        mu = wheel_mu(n)
        mode = MODE_AVERAGE if n == 4 else MODE_TWO_GROUPS
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, mu), (1.0, POS_INF)),
            unstable=((mu, 1.0),),
            marginal=((mu, mode), (1.0, MODE_AVERAGE)),
        )
    if k == "hypercube":
        m = p[0]
        c = 1.0 / (m - 1)
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, -1.0), (-c, c), (1.0, POS_INF)),
            unstable=((-1.0, -c), (c, 1.0)),
            marginal=(
                (-1.0, MODE_TWO_GROUPS),
                (-c, MODE_TWO_GROUPS),
                (c, MODE_AVERAGE),
                (1.0, MODE_AVERAGE),
            ),
        )
    if k == "petersen":
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, 0.5), (1.0, POS_INF)),
            unstable=((0.5, 1.0),),
            marginal=((0.5, MODE_AVERAGE), (1.0, MODE_AVERAGE)),
        )
    if k == "complete":
        n = p[0]
        c = 1.0 / (n - 2)
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, c), (1.0, POS_INF)),
            unstable=((c, 1.0),),
            marginal=((c, MODE_AVERAGE), (1.0, MODE_AVERAGE)),
        )
    if k == "bipartite":
        m, n = p
        c = 1.0 / math.sqrt((m - 1) * (n - 1))
        if c == 1.0:  # m = n = 2: thresholds coincide with +/-1
            return FamilyStability(
                family=fam,
                stable=((NEG_INF, -1.0), (-1.0, 1.0), (1.0, POS_INF)),
                unstable=(),
                marginal=((-1.0, MODE_TWO_GROUPS), (1.0, MODE_AVERAGE)),
            )
        inner_mode = MODE_AVERAGE if m == n else MODE_TWO_GROUPS
        return FamilyStability(
            family=fam,
            stable=((NEG_INF, -1.0), (-c, c), (1.0, POS_INF)),
            unstable=((-1.0, -c), (c, 1.0)),
            marginal=(
                (-1.0, MODE_TWO_GROUPS),
                (-c, MODE_TWO_GROUPS),
                (c, inner_mode),
                (1.0, MODE_AVERAGE),
            ),
        )
    if k == "directed-path":
        return FamilyStability(
            family=fam,
            stable=((-1.0, 1.0),),
            unstable=((NEG_INF, -1.0), (1.0, POS_INF)),
            marginal=((-1.0, MODE_TWO_GROUPS), (1.0, MODE_CONSENSUS_X1)),
        )
    if k == "directed-cycle":
        n = p[0]
        if n % 2 == 0:
            return FamilyStability(
                family=fam,
                stable=((-1.0, 1.0),),
                unstable=((NEG_INF, -1.0), (1.0, POS_INF)),
                marginal=((-1.0, MODE_TWO_GROUPS), (1.0, MODE_AVERAGE)),
            )
        theta = directed_cycle_oscillation(n)["theta"]
        return FamilyStability(
            family=fam,
            stable=((theta, 1.0),),
            unstable=((NEG_INF, theta), (1.0, POS_INF)),
            marginal=((theta, MODE_OSCILLATION), (1.0, MODE_AVERAGE)),
        )
    raise AssertionError(k)
