import math

import numpy as np
import pytest

from dclab import (
    ParameterOutOfRangeError,
    deformed_laplacian,
    directed_cycle_oscillation,
    family_spectrum,
    family_stability,
    generate_family,
    parse_family_spec,
    wheel_mu,
)

# every family at two-to-three sizes, n <= 64
ORACLE_INSTANCES = [
    "path:2", "path:7", "path:33",
    "cycle:3", "cycle:8", "cycle:21",
    "mtree:2:2", "mtree:2:4", "mtree:3:3",
    "wheel:4", "wheel:6", "wheel:12",
    "hypercube:3", "hypercube:4", "hypercube:6",
    "petersen",
    "complete:3", "complete:9", "complete:40",
    "bipartite:2:2", "bipartite:2:5", "bipartite:7:9",
    "star:3", "star:6", "star:30",
    "directed-path:2", "directed-path:9", "directed-path:40",
    "directed-cycle:3", "directed-cycle:8", "directed-cycle:15",
]


def sorted_complex(values):
    return sorted(values, key=lambda z: (round(z.real, 10), round(z.imag, 10)))


@pytest.mark.parametrize("spec", ORACLE_INSTANCES)
def test_oracle_equivalence(spec, rng):
    """Closed-form spectra match dense eigenvalues of -Delta(s)."""
    fam = parse_family_spec(spec)
    g = generate_family(fam)
    for s in rng.uniform(-3, 3, size=10):
        s = float(s)
        claimed = sorted_complex(family_spectrum(fam, s).eigenvalues)
        m = -deformed_laplacian(g, s)
        numeric = sorted_complex(
            complex(v) for v in (np.linalg.eigvals(m) if g.directed else np.linalg.eigvalsh(m))
        )
        assert len(claimed) == g.n
        err = max(abs(a - b) for a, b in zip(claimed, numeric))
        assert err < 1e-8, f"{spec} at s={s}: deviation {err}"


class TestSpectrumValues:
    def test_cycle4_at_one(self):
        sp = family_spectrum(parse_family_spec("cycle:4"), 1.0)
        assert sorted(round(z.real, 9) for z in sp.eigenvalues) == [-4, -2, -2, 0]
        assert sp.provenance == "closed-form"

    def test_petersen_at_half(self):
        sp = family_spectrum(parse_family_spec("petersen"), 0.5)
        vals = sorted(z.real for z in sp.eigenvalues)
        assert abs(vals[-1]) < 1e-12  # -2(1/4) + 3(1/2) - 1 = 0
        assert all(v < 0 for v in vals[:-1])

    def test_directed_cycle3_at_minus_two(self):
        sp = family_spectrum(parse_family_spec("directed-cycle:3"), -2.0)
        imag = sorted(round(z.imag, 9) for z in sp.eigenvalues)
        root3 = round(math.sqrt(3), 9)
        assert imag == [-root3, 0, root3]
        pure = [z for z in sp.eigenvalues if abs(z.real) < 1e-12 and z.imag != 0]
        assert len(pure) == 2

    @pytest.mark.parametrize("n,s", [(4, 0.7), (7, -1.3)])
    def test_directed_path_spectrum(self, n, s):
        sp = family_spectrum(parse_family_spec(f"directed-path:{n}"), s)
        groups = sp.multiplicities()
        assert (complex(-1), n - 1) in groups
        assert any(abs(v - (s**2 - 1)) < 1e-12 and m == 1 for v, m in groups)

    def test_numeric_fallback_flag(self):
        assert family_spectrum(parse_family_spec("path:5"), 0.3).provenance == "numeric"
        assert family_spectrum(parse_family_spec("mtree:2:2"), 0.3).provenance == "numeric"
        assert family_spectrum(parse_family_spec("cycle:5"), 0.3).provenance == "closed-form"

    def test_multiplicity_total_is_n(self):
        for spec in ["hypercube:4", "complete:7", "star:5", "mtree:2:3"]:
            fam = parse_family_spec(spec)
            sp = family_spectrum(fam, -0.8)
            assert sum(m for _, m in sp.multiplicities()) == len(sp.eigenvalues)


class TestDeterminantIdentities:
    def test_cycle_determinant(self, rng):
        for n in (3, 4, 5, 6):
            g = generate_family(parse_family_spec(f"cycle:{n}"))
            for s in rng.uniform(-2, 2, size=20):
                s = float(s)
                det = np.linalg.det(-deformed_laplacian(g, s))
                expected = (-1) ** n * (s ** (2 * n) - 2 * s**n + 1)
                assert det == pytest.approx(expected, rel=1e-8, abs=1e-9)

    def test_directed_cycle_determinant(self, rng):
        for n in (3, 4, 5, 8):
            g = generate_family(parse_family_spec(f"directed-cycle:{n}"))
            for s in rng.uniform(-2, 2, size=20):
                s = float(s)
                det = np.linalg.det(-deformed_laplacian(g, s))
                expected = (-1) ** n * (1 - s**n)
                assert det == pytest.approx(expected, rel=1e-8, abs=1e-9)


class TestScalingIdentities:
    def test_complete_scaling(self):
        for n in (4, 5, 9):
            g = generate_family(parse_family_spec(f"complete:{n}"))
            c = 1.0 / (n - 2)
            lhs = deformed_laplacian(g, c)
            rhs = c * deformed_laplacian(g, 1.0)
            assert np.abs(lhs - rhs).max() < 1e-12

    def test_hypercube_scaling(self):
        for m in (3, 4):
            g = generate_family(parse_family_spec(f"hypercube:{m}"))
            c = 1.0 / (m - 1)
            lhs = deformed_laplacian(g, -c)
            rhs = c * deformed_laplacian(g, -1.0)
            assert np.abs(lhs - rhs).max() < 1e-12

    def test_petersen_scaling(self):
        g = generate_family(parse_family_spec("petersen"))
        lhs = deformed_laplacian(g, 0.5)
        rhs = 0.5 * deformed_laplacian(g, 1.0)
        assert np.abs(lhs - rhs).max() < 1e-12


class TestWheelMu:
    def lam1(self, n, s):
        root = math.sqrt(((n - 4) * s + 2) ** 2 + 4 * (n - 1))
        return -(n / 2) * s**2 + s + 0.5 * root * s - 1.0

    def test_n4_is_half(self):
        assert wheel_mu(4) == pytest.approx(0.5, abs=1e-12)

    def test_n5_residual_and_range(self):
        mu = wheel_mu(5)
        assert 0 < mu < 0.5
        assert abs(self.lam1(5, mu)) < 1e-10

    def test_monotone_decreasing(self):
        values = [wheel_mu(n) for n in (4, 5, 8, 20, 50, 100)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert wheel_mu(100) < wheel_mu(5)

    def test_rejects_small_n(self):
        with pytest.raises(ParameterOutOfRangeError):
            wheel_mu(3)


class TestDirectedCycleOscillation:
    def test_n3_constants(self):
        osc = directed_cycle_oscillation(3)
        assert osc["theta"] == pytest.approx(-2.0, abs=1e-12)
        assert osc["frequency"] == pytest.approx(math.sqrt(3) / (2 * math.pi), abs=1e-12)

    def test_n5_theta(self):
        osc = directed_cycle_oscillation(5)
        assert osc["theta"] == pytest.approx(1.0 / math.cos(16 * math.pi / 5), abs=1e-12)
        assert osc["theta"] == pytest.approx(-1.2360679774997896, abs=1e-9)

    def test_n5_pure_imaginary_pair(self):
        osc = directed_cycle_oscillation(5)
        sp = family_spectrum(parse_family_spec("directed-cycle:5"), osc["theta"])
        target = abs(math.tan(16 * math.pi / 5))
        pure = [z for z in sp.eigenvalues if abs(z.real) < 1e-10 and abs(z.imag) > 1e-6]
        assert len(pure) == 2
        assert all(abs(abs(z.imag) - target) < 1e-10 for z in pure)

    def test_phase_list_verbatim(self):
        osc = directed_cycle_oscillation(5)
        tangent = math.tan(16 * math.pi / 5)
        assert len(osc["phases"]) == 5
        for i, phi in enumerate(osc["phases"], start=1):
            assert phi == pytest.approx(2 * math.pi * (i - 1) / (5 * tangent), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_rejects_even(self, n):
        with pytest.raises(ParameterOutOfRangeError):
            directed_cycle_oscillation(n)


class TestFamilyStability:
    def test_complete4(self):
        fs = family_stability(parse_family_spec("complete:4"))
        assert fs.stable == ((float("-inf"), 0.5), (1.0, float("inf")))
        assert fs.unstable == ((0.5, 1.0),)
        assert fs.marginal == ((0.5, "average-consensus"), (1.0, "average-consensus"))

    def test_hypercube3(self):
        fs = family_stability(parse_family_spec("hypercube:3"))
        marg = dict(fs.marginal)
        assert marg[-1.0] == "two-groups"
        assert marg[-0.5] == "two-groups"
        assert marg[0.5] == "average-consensus"
        assert marg[1.0] == "average-consensus"
        assert (0.5, 1.0) in fs.unstable and (-1.0, -0.5) in fs.unstable

    def test_directed_cycle_even(self):
        fs = family_stability(parse_family_spec("directed-cycle:4"))
        assert fs.stable == ((-1.0, 1.0),)
        assert dict(fs.marginal) == {-1.0: "two-groups", 1.0: "average-consensus"}

    def test_directed_cycle_odd_oscillation(self):
        fs = family_stability(parse_family_spec("directed-cycle:5"))
        theta = directed_cycle_oscillation(5)["theta"]
        assert fs.stable == ((theta, 1.0),)
        assert dict(fs.marginal)[theta] == "stable-oscillation"

    def test_directed_path_consensus_tag(self):
        fs = family_stability(parse_family_spec("directed-path:4"))
        assert dict(fs.marginal)[1.0] == "consensus-on-x1"

    def test_k22_degenerate_thresholds(self):
        fs = family_stability(parse_family_spec("bipartite:2:2"))
        assert len(fs.marginal) == 2
        assert dict(fs.marginal) == {-1.0: "two-groups", 1.0: "average-consensus"}
        assert fs.unstable == ()

    def test_bipartite_unequal_sides_inner_mode(self):
        fs = family_stability(parse_family_spec("bipartite:2:3"))
        c = 1.0 / math.sqrt(2)
        inner = [kind for s, kind in fs.marginal if abs(s - c) < 1e-12]
        assert inner == ["two-groups"]
        fs_sq = family_stability(parse_family_spec("bipartite:3:3"))
        assert dict(fs_sq.marginal)[0.5] == "average-consensus"

    def test_wheel_modes(self):
        assert dict(family_stability(parse_family_spec("wheel:4")).marginal)[0.5] == "average-consensus"
        fs = family_stability(parse_family_spec("wheel:5"))
        mu = wheel_mu(5)
        assert dict(fs.marginal)[mu] == "two-groups"

    def test_regions_and_marginals_partition_line(self):
        for spec in ["path:5", "cycle:6", "wheel:5", "hypercube:3", "complete:5",
                     "bipartite:2:3", "star:4", "directed-cycle:5"]:
            fs = family_stability(parse_family_spec(spec))
            intervals = sorted(fs.stable + fs.unstable)
            points = sorted(s for s, _ in fs.marginal)
            # intervals are disjoint, ordered, and meet exactly at marginal points
            for (lo1, hi1), (lo2, hi2) in zip(intervals, intervals[1:]):
                assert hi1 <= lo2 + 1e-12
            interior = [p for (lo, hi) in intervals for p in points if lo < p < hi]
            assert interior == []


@pytest.mark.parametrize("spec", [
    "path:4", "cycle:5", "cycle:6", "mtree:2:2", "wheel:5", "hypercube:3",
    "petersen", "complete:5", "bipartite:2:3", "star:4",
    "directed-path:4", "directed-cycle:4", "directed-cycle:5",
])
def test_marginal_points_match_spectrum_zero_crossings(spec):
    """family_stability marginal points are exactly the real s where the
    extremal real part of the closed-form spectrum vanishes."""
    fam = parse_family_spec(spec)
    fs = family_stability(fam)

    def max_re(s):
        return max(z.real for z in family_spectrum(fam, float(s)).eigenvalues)

    # every reported marginal point sits on a zero of the extremal real part
    for s_star, _ in fs.marginal:
        assert abs(max_re(s_star)) < 1e-8

    # region classification agrees with the spectrum on a grid
    regions = [(lo, hi, "stable") for lo, hi in fs.stable]
    regions += [(lo, hi, "unstable") for lo, hi in fs.unstable]
    for lo, hi, kind in regions:
        lo_c = max(lo, -3.0)
        hi_c = min(hi, 3.0)
        if hi_c <= lo_c:
            continue
        for s in np.linspace(lo_c + 1e-3, hi_c - 1e-3, 9):
            value = max_re(s)
            if kind == "stable":
                assert value < 0, f"{spec}: max Re = {value} at s={s} inside stable region"
            else:
                assert value > 0, f"{spec}: max Re = {value} at s={s} inside unstable region"

    # any sign change of the extremal real part on a fine grid refines to a
    # reported marginal point
    grid = np.linspace(-3, 3, 1201)
    vals = [max_re(s) for s in grid]
    points = sorted(s for s, _ in fs.marginal)
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0 or fa * fb >= 0:
            continue
        lo_b, hi_b = float(a), float(b)
        for _ in range(60):
            mid = 0.5 * (lo_b + hi_b)
            if max_re(lo_b) * max_re(mid) <= 0:
                hi_b = mid
            else:
                lo_b = mid
        crossing = 0.5 * (lo_b + hi_b)
        assert min(abs(crossing - p) for p in points) < 1e-8
