import json
import math

import numpy as np
import pytest
import scipy.linalg

from dclab import (
    ASYMPTOTICALLY_STABLE,
    UNSTABLE,
    DimensionMismatchError,
    EpsilonOutOfRangeError,
    FitDidNotConvergeError,
    PerronConfig,
    StepMismatchError,
    SwitchSchedule,
    Trajectory,
    WindowTooShortError,
    classify_at,
    deformed_laplacian,
    directed_cycle_oscillation,
    discrete_run,
    generate_family,
    integrate,
    matrices,
    max_spectrum_real_part,
    oscillation_fit,
    parse_family_spec,
    planar_sim,
    predicted_limit,
    settle,
    structure_probe,
    trajectory_to_csv,
)
from dclab.dynamics import load_scenario, run_scenario, scenario_from_dict
from conftest import random_connected_graph


def fam_graph(spec):
    return generate_family(parse_family_spec(spec))


class TestSwitchSchedule:
    def test_valid(self):
        sched = SwitchSchedule(segments=((0.0, -1.0), (2.0, 0.0)), total_time=5.0)
        assert sched.s_at(0.0) == -1.0
        assert sched.s_at(1.999) == -1.0
        assert sched.s_at(2.0) == 0.0
        assert list(sched.bounds()) == [(0.0, 2.0, -1.0), (2.0, 5.0, 0.0)]

    @pytest.mark.parametrize("segments,total", [
        (((1.0, 0.0),), 5.0),              # must start at 0
        (((0.0, 1.0), (0.5, 2.0), (0.5, 3.0)), 5.0),  # strictly increasing
        (((0.0, 1.0), (6.0, 2.0)), 5.0),   # last start before T
        (((0.0, float("nan")),), 5.0),     # finite s
    ])
    def test_invalid(self, segments, total):
        with pytest.raises(ValueError):
            SwitchSchedule(segments=segments, total_time=total)


class TestIntegrate:
    def test_average_consensus_at_one(self, rng):
        g = fam_graph("path:4")
        x0 = rng.normal(0, 2, size=4)
        traj = integrate(g, SwitchSchedule.constant(1.0, 40.0), x0, 1e-3)
        assert np.abs(traj.final_state - x0.mean()).max() < 1e-6
        assert np.array_equal(traj.states[0], x0)

    def test_identity_decay_at_zero(self, rng):
        g = fam_graph("path:6")
        x0 = rng.normal(0, 1, size=6)
        traj = integrate(g, SwitchSchedule.constant(0.0, 3.0), x0, 1e-3)
        idx = 1500  # t = 1.5
        assert np.abs(traj.states[idx] - math.exp(-1.5) * x0).max() < 1e-9

    def test_cycle8_even_odd_clustering(self, rng):
        g = fam_graph("cycle:8")
        x0 = rng.normal(0, 2, size=8)
        sched = SwitchSchedule(segments=((0.0, 0.0), (1.0, -1.0)), total_time=40.0)
        traj = integrate(g, sched, x0, 1e-3)
        at_switch = traj.states[1000]
        k = np.array([(-1.0) ** i for i in range(1, 9)])
        c = (k @ at_switch) / 8.0
        assert np.abs(traj.final_state - c * k).max() < 1e-6

    def test_step_mismatch(self):
        g = fam_graph("path:4")
        sched = SwitchSchedule(segments=((0.0, 0.0), (1.0, -1.0)), total_time=2.0)
        with pytest.raises(StepMismatchError):
            integrate(g, sched, np.zeros(4), 3e-3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            integrate(fam_graph("path:4"), SwitchSchedule.constant(1.0, 1.0), np.zeros(5), 1e-3)

    def test_divergence_tag(self):
        g = fam_graph("path:4")
        traj = integrate(g, SwitchSchedule.constant(2.0, 300.0), np.ones(4), 1e-2)
        assert traj.status == "divergent"
        assert np.abs(traj.states[-1]).max() > 1e9
        assert traj.times[-1] < 300.0

    def test_mean_conserved_at_one_undirected(self, rng):
        g = fam_graph("wheel:5")
        x0 = rng.normal(0, 3, size=5)
        traj = integrate(g, SwitchSchedule.constant(1.0, 5.0), x0, 1e-3)
        sums = traj.states.sum(axis=1)
        assert np.abs(sums - sums[0]).max() < 1e-8 * max(1.0, abs(sums[0]))

    def test_mean_conserved_balanced_digraph(self, rng):
        g = fam_graph("directed-cycle:6")
        assert structure_probe(g).balanced
        x0 = rng.normal(0, 3, size=6)
        traj = integrate(g, SwitchSchedule.constant(1.0, 5.0), x0, 1e-3)
        sums = traj.states.sum(axis=1)
        assert np.abs(sums - sums[0]).max() < 1e-8 * max(1.0, abs(sums[0]))

    def test_matches_eigendecomposition_solution(self, rng):
        g = random_connected_graph(rng, 6)
        s = 0.7
        x0 = rng.normal(0, 1, size=6)
        traj = integrate(g, SwitchSchedule.constant(s, 10.0), x0, 1e-3)
        w, u = np.linalg.eigh(deformed_laplacian(g, s))
        for t_idx in (1000, 5000, 10000):
            t = traj.times[t_idx]
            exact = u @ (np.exp(-w * t) * (u.T @ x0))
            assert np.abs(traj.states[t_idx] - exact).max() < 1e-6

    @pytest.mark.parametrize("spec", ["path:5", "cycle:6", "mtree:2:2",
                                      "hypercube:3", "bipartite:2:3", "star:4"])
    def test_bipartite_consensus_limit(self, spec, rng):
        g = fam_graph(spec)
        wq, vq = np.linalg.eigh(matrices(g).Q)
        assert abs(wq[0]) < 1e-10
        u_n = vq[:, 0]
        x0 = rng.normal(0, 2, size=g.n)
        final, converged = settle(g, -1.0, x0)
        assert converged
        assert np.abs(final - np.outer(u_n, u_n) @ x0).max() < 1e-5

    def test_fourth_order_convergence(self):
        g = fam_graph("path:5")
        s, t_end = 0.8, 2.0
        x0 = np.array([1.0, -2.0, 0.5, 3.0, -1.0])
        exact = scipy.linalg.expm(-t_end * deformed_laplacian(g, s)) @ x0

        def terminal_error(dt):
            traj = integrate(g, SwitchSchedule.constant(s, t_end), x0, dt)
            return np.abs(traj.final_state - exact).max()

        e1, e2 = terminal_error(0.02), terminal_error(0.01)
        assert e1 / e2 == pytest.approx(16.0, rel=0.25)
        assert e1 < 5.0 * 0.02**4


class TestDiscreteRun:
    def test_complete4_mean(self, rng):
        g = fam_graph("complete:4")
        x0 = rng.normal(0, 1, size=4)
        traj = discrete_run(g, PerronConfig(epsilon=0.2, s=1.0, iterations=2000), x0)
        assert np.abs(traj.final_state - x0.mean()).max() < 1e-9

    def test_path4_alternating_limit(self, rng):
        g = fam_graph("path:4")
        x0 = rng.normal(0, 1, size=4)
        traj = discrete_run(g, PerronConfig(epsilon=0.3, s=-1.0, iterations=4000), x0)
        k = np.array([-1.0, 1.0, -1.0, 1.0])
        expected = np.outer(k, k) @ x0 / 4.0
        assert np.abs(traj.final_state - expected).max() < 1e-8

    def test_path4_divergence_above_one(self):
        g = fam_graph("path:4")
        traj = discrete_run(g, PerronConfig(epsilon=0.3, s=2.0, iterations=5000), np.ones(4))
        assert traj.status == "divergent" or np.abs(traj.final_state).max() > 1e6

    @pytest.mark.parametrize("eps", [0.0, -0.1, 0.5, 1.0])
    def test_epsilon_range(self, eps):
        g = fam_graph("path:4")  # d_max = 2 so (0, 0.5) is the legal range
        with pytest.raises(EpsilonOutOfRangeError):
            discrete_run(g, PerronConfig(epsilon=eps, s=1.0, iterations=10), np.ones(4))

    def test_agreement_with_continuous_verdicts(self, rng):
        """Discrete iteration with eps = 0.9/d_max converges exactly when the
        continuous protocol is stable or marginal, for |s| < 1."""
        pairs = []
        while len(pairs) < 20:
            g = random_connected_graph(rng, int(rng.integers(3, 12)))
            s = float(rng.uniform(-0.99, 0.99))
            if abs(max_spectrum_real_part(g, s)) < 0.05:
                continue  # stay away from thresholds so K=8000 is decisive
            pairs.append((g, s))
        verdicts = set()
        for g, s in pairs:
            continuous = classify_at(g, s)
            d_max = structure_probe(g).max_degree
            eps = 0.9 / d_max
            x0 = rng.normal(0, 1, size=g.n)
            traj = discrete_run(g, PerronConfig(epsilon=eps, s=s, iterations=8000), x0)
            diverged = traj.status == "divergent" or np.abs(traj.final_state).max() > 1e6
            if continuous == UNSTABLE:
                assert diverged, f"{g.label()} at s={s}"
            else:
                assert not diverged, f"{g.label()} at s={s}"
                tail = np.abs(traj.states[-1] - traj.states[-2]).max()
                assert tail < 1e-6 * max(1.0, np.abs(traj.final_state).max())
            verdicts.add(continuous)
        assert {ASYMPTOTICALLY_STABLE, UNSTABLE} <= verdicts


class TestPlanar:
    def test_kronecker_factorization(self, rng):
        g = fam_graph("path:6")
        p0 = rng.normal(0, 2, size=12)
        sched = SwitchSchedule(segments=((0.0, -1.0), (2.0, 0.5)), total_time=4.0)
        planar = planar_sim(g, sched, p0, 1e-3)
        xs = integrate(g, sched, p0[0::2], 1e-3)
        ys = integrate(g, sched, p0[1::2], 1e-3)
        assert np.abs(planar.states[:, 0::2] - xs.states).max() < 1e-12
        assert np.abs(planar.states[:, 1::2] - ys.states).max() < 1e-12

    def test_rendezvous_at_origin(self, rng):
        g = fam_graph("path:6")
        p0 = rng.normal(0, 2, size=12)
        sched = SwitchSchedule(segments=((0.0, -1.0), (6.0, 0.0)), total_time=22.0)
        traj = planar_sim(g, sched, p0, 1e-3)
        assert np.abs(traj.final_state).max() < 1e-3

    def test_consensus_on_coordinate_means(self, rng):
        g = fam_graph("cycle:5")
        p0 = rng.normal(0, 2, size=10)
        traj = planar_sim(g, SwitchSchedule.constant(1.0, 40.0), p0, 1e-3)
        assert np.abs(traj.final_state[0::2] - p0[0::2].mean()).max() < 1e-6
        assert np.abs(traj.final_state[1::2] - p0[1::2].mean()).max() < 1e-6

    def test_orbit_frequency(self, rng):
        # a regular polygon in cycle order only excites the decaying spatial
        # modes; generic positions overlap the oscillatory pair
        g = fam_graph("directed-cycle:5")
        osc = directed_cycle_oscillation(5)
        p0 = rng.normal(0, 2, size=10)
        traj = planar_sim(g, SwitchSchedule.constant(osc["theta"], 60.0), p0, 1e-3)
        xs = Trajectory(
            times=traj.times, states=traj.states[:, 0::2],
            s_values=traj.s_values, graph_id=traj.graph_id,
        )
        fit = oscillation_fit(xs, (15.0, 60.0))
        assert fit.frequency == pytest.approx(abs(osc["frequency"]), rel=0.01)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            planar_sim(fam_graph("path:4"), SwitchSchedule.constant(1.0, 1.0),
                       np.zeros(4), 1e-3)


class TestPredictedLimit:
    def test_directed_path_consensus_on_first(self, rng):
        g = fam_graph("directed-path:4")
        x0 = rng.normal(0, 2, size=4)
        p = predicted_limit(g, 1.0, x0)
        assert p.kind == "limit"
        assert np.abs(p.vector - x0[0]).max() < 1e-9

    def test_star_bipartite_pattern(self, rng):
        g = fam_graph("star:3")
        x0 = rng.normal(0, 2, size=4)
        p = predicted_limit(g, -1.0, x0)
        pattern = np.array([1.0, -1.0, -1.0, -1.0])
        expected = pattern * (x0 @ pattern) / 4.0
        assert np.abs(p.vector - expected).max() < 1e-9

    def test_stable_gives_zero(self, rng):
        p = predicted_limit(fam_graph("cycle:4"), 0.3, rng.normal(size=4))
        assert p.kind == "zero"
        assert np.abs(p.vector).max() == 0.0

    def test_unstable_tagged_divergent(self, rng):
        p = predicted_limit(fam_graph("path:4"), 2.0, rng.normal(size=4))
        assert p.kind == "divergent"

    def test_limits_match_integration(self, rng):
        for spec, s in [("path:4", -1.0), ("complete:4", 0.5), ("directed-cycle:4", -1.0)]:
            g = fam_graph(spec)
            x0 = rng.normal(0, 1, size=g.n)
            p = predicted_limit(g, s, x0)
            final, converged = settle(g, s, x0)
            assert converged
            assert np.abs(final - p.vector).max() < 1e-6

    def test_multiplicity_above_one_propagates(self, rng):
        from dclab import MultiplicityAboveOneError, build_graph

        g = build_graph(4, [(1, 2), (3, 4)])  # Delta(-1) kernel has dimension 2
        with pytest.raises(MultiplicityAboveOneError):
            predicted_limit(g, -1.0, rng.normal(size=4))

    def test_oscillation_descriptor_matches_simulation(self, rng):
        g = fam_graph("directed-cycle:3")
        x0 = rng.normal(0, 1, size=3)
        p = predicted_limit(g, -2.0, x0)
        assert p.kind == "oscillation"
        traj = integrate(g, SwitchSchedule.constant(-2.0, 30.0), x0, 1e-3)
        fit = oscillation_fit(traj, (8.0, 30.0))
        assert fit.frequency == pytest.approx(p.oscillation["frequency"], rel=0.01)
        assert fit.frequency == pytest.approx(math.sqrt(3) / (2 * math.pi), rel=0.01)
        assert np.abs(fit.amplitudes - p.oscillation["amplitudes"]).max() < 0.01 * fit.amplitudes.max()
        predicted_rel = p.oscillation["phases"] - p.oscillation["phases"][0]
        for got, want in zip(fit.phases, predicted_rel):
            delta = (got - want + math.pi) % (2 * math.pi) - math.pi
            assert abs(delta) < 0.05


class TestOscillationFit:
    def test_constant_trajectory_rejected(self):
        times = np.arange(101) * 0.1
        states = np.ones((101, 3))
        traj = Trajectory(times, states, np.ones(101), "const")
        with pytest.raises(FitDidNotConvergeError):
            oscillation_fit(traj, (0.0, 10.0))

    def test_window_outside_trajectory(self):
        times = np.arange(101) * 0.1
        traj = Trajectory(times, np.ones((101, 2)), np.ones(101), "const")
        with pytest.raises(WindowTooShortError):
            oscillation_fit(traj, (5.0, 20.0))

    def test_too_few_samples(self):
        times = np.arange(101) * 0.1
        traj = Trajectory(times, np.ones((101, 2)), np.ones(101), "const")
        with pytest.raises(WindowTooShortError):
            oscillation_fit(traj, (0.0, 0.5))

    def test_recovers_synthetic_sinusoid(self):
        t = np.arange(4000) * 5e-3
        f = 0.35
        states = np.column_stack([
            1.5 * np.sin(2 * np.pi * f * t + 0.4),
            0.7 * np.sin(2 * np.pi * f * t + 1.1) + 0.2,
        ])
        traj = Trajectory(t, states, np.zeros_like(t), "synthetic")
        fit = oscillation_fit(traj, (0.0, float(t[-1])))
        assert fit.frequency == pytest.approx(f, rel=1e-4)
        assert fit.amplitudes == pytest.approx([1.5, 0.7], rel=1e-3)
        assert fit.phases[1] == pytest.approx(0.7, abs=1e-3)  # 1.1 - 0.4


class TestScenarioFiles:
    def test_round_trip(self, tmp_path, rng):
        doc = {
            "graph": {"family": "cycle", "n": 5},
            "schedule": [[0.0, 1.0], [1.0, -1.0]],
            "T": 2.0,
            "x0": [0.1, 0.2, 0.3, 0.4, 0.5],
            "dt": 1e-3,
            "name": "demo",
        }
        path = tmp_path / "sc.json"
        path.write_text(json.dumps(doc))
        sc = load_scenario(path)
        assert not sc.planar and sc.graph.n == 5
        traj = run_scenario(sc)
        assert traj.times[-1] == pytest.approx(2.0)

    def test_planar_inferred_from_length(self):
        doc = {
            "graph": {"family": "path", "n": 3},
            "schedule": [[0.0, 0.0]],
            "T": 1.0,
            "x0": [0.0] * 6,
            "dt": 1e-3,
        }
        assert scenario_from_dict(doc).planar

    def test_bad_state_length(self):
        doc = {
            "graph": {"family": "path", "n": 3},
            "schedule": [[0.0, 0.0]],
            "T": 1.0,
            "x0": [0.0] * 5,
            "dt": 1e-3,
        }
        with pytest.raises(DimensionMismatchError):
            scenario_from_dict(doc)

    def test_csv_export(self, tmp_path, rng):
        g = fam_graph("path:3")
        traj = integrate(g, SwitchSchedule.constant(0.5, 0.1), rng.normal(size=3), 1e-2)
        dest = tmp_path / "traj.csv"
        trajectory_to_csv(traj, dest)
        lines = dest.read_text().strip().splitlines()
        assert lines[0] == "time,s,x1,x2,x3"
        assert len(lines) == len(traj.times) + 1
        row = [float(v) for v in lines[1].split(",")]
        assert row[0] == 0.0 and row[1] == 0.5
        assert row[2:] == pytest.approx(traj.states[0])

    def test_planar_csv_header(self, tmp_path, rng):
        g = fam_graph("path:3")
        traj = planar_sim(g, SwitchSchedule.constant(0.0, 0.05), rng.normal(size=6), 1e-2)
        dest = tmp_path / "traj.csv"
        trajectory_to_csv(traj, dest)
        assert dest.read_text().splitlines()[0] == "time,s,p1x,p1y,p2x,p2y,p3x,p3y"
