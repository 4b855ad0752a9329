import math

import numpy as np
import pytest

from swarmflock.core import MODEL_BASELINE, MODEL_SCS, MODEL_SV, ModelParams, SystemState
from swarmflock.integrators import (
    IntegratorConfig,
    SolverError,
    integrate,
    integrate_flat,
    sample_times,
    step_rk4,
)


class TestStepRk4:
    def test_linear_growth_equals_degree4_taylor(self):
        # y' = y, dt = 0.1: RK4 reproduces sum_{k<=4} 0.1^k / k!
        y1 = step_rk4(np.array([1.0]), lambda y: y, 0.1)
        expected = sum(0.1**k / math.factorial(k) for k in range(5))
        assert y1[0] == pytest.approx(expected, rel=1e-15)

    def test_linear_decay(self):
        y1 = step_rk4(np.array([1.0]), lambda y: -y, 0.1)
        expected = sum((-0.1) ** k / math.factorial(k) for k in range(5))
        assert y1[0] == pytest.approx(expected, rel=1e-15)  # 0.9048375416666667

    def test_constant_solution(self):
        y = np.array([3.7, -1.2])
        out = step_rk4(y, lambda y: np.zeros_like(y), 0.5)
        assert np.array_equal(out, y)

    def test_non_finite_derivative_aborts(self):
        with pytest.raises(SolverError):
            step_rk4(np.array([1.0]), lambda y: y * math.nan, 0.1)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            step_rk4(np.array([1.0]), lambda y: y, 0.0)


class TestRk4Convergence:
    def test_order_between_3p7_and_4p3(self):
        def run(dt):
            y = np.array([1.0])
            steps = round(1.0 / dt)
            for _ in range(steps):
                y = step_rk4(y, lambda u: -u, dt)
            return abs(y[0] - math.exp(-1.0))

        e1, e2 = run(0.05), run(0.025)
        ratio = e1 / e2
        assert 13.0 <= ratio <= 19.0
        assert 3.7 <= math.log2(ratio) <= 4.3


class TestSampleTimes:
    def test_exact_arithmetic_sequence(self):
        t = sample_times(2.0, 0.25)
        assert np.array_equal(t, [k * 0.25 for k in range(9)])

    def test_final_time_always_included(self):
        t = sample_times(1.1, 0.25)
        assert t[-1] == 1.1
        assert np.array_equal(t[:-1], [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_t_end_on_grid_not_duplicated(self):
        t = sample_times(50.0, 1.0)
        assert len(t) == 51 and t[-1] == 50.0


class TestIntegratorConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t_end": 0.0, "sample_every": 1.0},
            {"t_end": 1.0, "sample_every": 0.0},
            {"t_end": 1.0, "sample_every": 1.0, "dt": -0.1},
            {"t_end": 1.0, "sample_every": 1.0, "rel_tol": 0.0},
            {"t_end": 1.0, "sample_every": 1.0, "abs_tol": -1e-9},
            {"t_end": 1.0, "sample_every": 1.0, "method": "euler"},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)


class TestAdaptiveOnScalarProblems:
    def test_exponential_decay_accuracy(self):
        cfg = IntegratorConfig(t_end=2.0, sample_every=0.5, rel_tol=1e-9, abs_tol=1e-12)
        times, samples, stats = integrate_flat(lambda y: -y, np.array([1.0]), cfg)
        assert np.allclose(samples[:, 0], np.exp(-times), rtol=1e-7)
        assert stats.n_accepted > 0
        assert stats.n_rhs_evals > 7 * stats.n_accepted - 7

    def test_tolerance_tightening_reduces_error(self):
        def err_at(rel):
            cfg = IntegratorConfig(t_end=3.0, sample_every=3.0, rel_tol=rel, abs_tol=rel * 1e-3)
            _, samples, _ = integrate_flat(
                lambda y: np.array([y[1], -y[0]]), np.array([0.0, 1.0]), cfg
            )
            return max(abs(samples[-1, 0] - math.sin(3.0)), abs(samples[-1, 1] - math.cos(3.0)))

        assert err_at(1e-8) <= err_at(1e-4) / 10.0

    def test_blow_up_aborts_with_time(self):
        cfg = IntegratorConfig(t_end=2.0, sample_every=2.0, rel_tol=1e-6, abs_tol=1e-9)
        with pytest.raises(SolverError) as exc:
            integrate_flat(lambda y: y * y, np.array([1.0]), cfg)
        # y' = y^2 from y(0) = 1 diverges at t = 1
        assert 0.9 <= exc.value.t_reached <= 1.05

    def test_minimum_step_fallback_warns_and_continues(self):
        # tolerances below machine precision make every step "fail"; the
        # stepper should crawl at the floor with warnings, not abort
        cfg = IntegratorConfig(
            t_end=5e-12, sample_every=5e-12, rel_tol=1e-300, abs_tol=1e-300
        )
        with pytest.warns(RuntimeWarning):
            times, samples, stats = integrate_flat(
                lambda y: np.cos(y) + 1.5, np.array([0.2]), cfg
            )
        assert stats.n_storm_accepts > 0
        assert times[-1] == 5e-12
        assert np.all(np.isfinite(samples))


class TestIntegrateModels:
    def test_single_agent_straight_line(self):
        st = SystemState(MODEL_SV, x=[[0.25, -0.5]], theta=[0.0], xi=[0.0])
        p = ModelParams(A=1, B=1, r=1.0, v0=0.003)
        cfg = IntegratorConfig(t_end=50.0, sample_every=10.0)
        traj = integrate(st, p, cfg)
        final = traj.final_state()
        assert final.x[0, 0] == pytest.approx(0.25 + 0.15, abs=1e-9)
        assert final.x[0, 1] == pytest.approx(-0.5, abs=1e-12)
        assert final.theta[0] == 0.0

    def test_equilibrium_pair_is_fixed_point(self):
        st = SystemState(MODEL_BASELINE, x=[[0, 0], [1, 0]], xi=[0, 0])
        p = ModelParams(A=1, B=1, J=0, K=1)
        cfg = IntegratorConfig(t_end=10.0, sample_every=2.0)
        traj = integrate(st, p, cfg)
        assert np.allclose(traj.samples[-1], traj.samples[0], atol=1e-9)

    def test_scs_mean_velocity_conserved(self):
        rng = np.random.default_rng(9)
        n = 12
        st = SystemState(
            MODEL_SCS,
            x=rng.uniform(-1, 1, (n, 2)),
            v=rng.uniform(-0.1, 0.1, (n, 2)),
            xi=rng.uniform(-math.pi, math.pi, n),
        )
        p = ModelParams(A=1, B=1, J=0.8, K=-0.5, cs_H=1, cs_beta=1)
        cfg = IntegratorConfig(t_end=5.0, sample_every=1.0)
        traj = integrate(st, p, cfg)
        v0_mean = st.v.mean(axis=0)
        v1_mean = traj.final_state().v.mean(axis=0)
        assert np.all(np.abs(v1_mean - v0_mean) <= 10 * cfg.rel_tol)

    def test_determinism_bit_identical(self):
        rng = np.random.default_rng(10)
        n = 8
        st = SystemState(
            MODEL_SV,
            x=rng.uniform(-0.5, 0.5, (n, 2)),
            theta=rng.uniform(-math.pi, math.pi, n),
            xi=rng.uniform(-math.pi, math.pi, n),
        )
        p = ModelParams(A=1, B=1, J=0.5, K=1.0, r=0.8, v0=0.003)
        cfg = IntegratorConfig(t_end=3.0, sample_every=0.5)
        t1 = integrate(st, p, cfg)
        t2 = integrate(st, p, cfg)
        assert np.array_equal(t1.samples, t2.samples)
        assert np.array_equal(t1.times, t2.times)

    def test_sample_grid_is_exact(self):
        st = SystemState(MODEL_BASELINE, x=[[0, 0], [1, 0]], xi=[0, 0.5])
        p = ModelParams(A=1, B=1, J=0.2, K=0.3)
        cfg = IntegratorConfig(t_end=1.1, sample_every=0.25)
        traj = integrate(st, p, cfg)
        assert np.array_equal(traj.times, [0.0, 0.25, 0.5, 0.75, 1.0, 1.1])

    def test_rk4_method_runs_and_samples(self):
        st = SystemState(MODEL_BASELINE, x=[[0, 0], [1.5, 0]], xi=[0, 1.0])
        p = ModelParams(A=1, B=1, J=0.2, K=0.3)
        cfg = IntegratorConfig(t_end=1.0, sample_every=0.3, method="rk4", dt=0.01)
        traj = integrate(st, p, cfg)
        assert np.array_equal(traj.times, [k * 0.3 for k in range(4)] + [1.0])
        ref = integrate(st, p, IntegratorConfig(t_end=1.0, sample_every=0.3))
        assert np.allclose(traj.samples[-1], ref.samples[-1], atol=1e-7)

    def test_angles_stay_wrapped(self):
        st = SystemState(MODEL_BASELINE, x=[[0, 0], [0.4, 0]], xi=[0, 2.0])
        p = ModelParams(A=1, B=1, J=0, K=0, omega=5.0)  # free-running phases
        cfg = IntegratorConfig(t_end=10.0, sample_every=1.0)
        traj = integrate(st, p, cfg)
        xi_cols = traj.samples[:, 4:]
        assert np.all(xi_cols > -math.pi) and np.all(xi_cols <= math.pi)

    def test_rk45_matches_rk4_reference(self):
        rng = np.random.default_rng(12)
        n = 5
        st = SystemState(
            MODEL_BASELINE,
            x=rng.uniform(-1, 1, (n, 2)),
            xi=rng.uniform(-math.pi, math.pi, n),
        )
        p = ModelParams(A=1, B=1, J=0.5, K=0.7)
        adaptive = integrate(st, p, IntegratorConfig(t_end=2.0, sample_every=2.0))
        reference = integrate(
            st, p, IntegratorConfig(t_end=2.0, sample_every=2.0, method="rk4", dt=1e-3)
        )
        assert np.allclose(adaptive.samples[-1], reference.samples[-1], atol=1e-6)
