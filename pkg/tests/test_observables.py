import math

import numpy as np
import pytest

from swarmflock.core import MODEL_BASELINE, MODEL_SCS, MODEL_SV, ModelParams, SystemState
from swarmflock.dynamics import pack_state
from swarmflock.integrators import Trajectory
from swarmflock.observables import (
    LABEL_ACTIVE_PHASE_WAVE,
    LABEL_STATIC_PHASE_WAVE,
    LABEL_STATIC_SYNC,
    classify,
    cluster_count,
    cluster_phase_coherence,
    gradient_score,
    heading_R,
    kuramoto_R,
    phase_space_components,
    phase_wave_S,
    summarize,
)


class TestKuramotoR:
    def test_identical_phases(self):
        assert kuramoto_R([0.7, 0.7, 0.7]) == pytest.approx(1.0, rel=1e-15)

    def test_antipodal_pair(self):
        assert kuramoto_R([0.0, math.pi]) == pytest.approx(0.0, abs=1e-15)

    def test_quarter_turn_pair(self):
        assert kuramoto_R([0.0, math.pi / 2]) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            kuramoto_R([])

    def test_invariant_under_global_shift(self):
        rng = np.random.default_rng(1)
        xi = rng.uniform(-math.pi, math.pi, 50)
        assert kuramoto_R(xi + 1.234) == pytest.approx(kuramoto_R(xi), abs=1e-12)


class TestHeadingR:
    def test_common_heading(self):
        assert heading_R(np.full(5, math.pi / 3)) == pytest.approx(1.0, rel=1e-15)

    def test_symmetric_fan(self):
        fan = [0.0, math.pi / 2, math.pi, 1.5 * math.pi]
        assert heading_R(fan) == pytest.approx(0.0, abs=1e-15)

    def test_velocity_vectors(self):
        assert heading_R(np.array([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(
            math.sqrt(2) / 2, rel=1e-12
        )

    def test_zero_velocities_excluded(self):
        vals = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert heading_R(vals) == pytest.approx(1.0, rel=1e-15)
        assert heading_R(np.zeros((4, 2))) == 0.0


def ring_positions(n, radius=1.0, center=(0.0, 0.0)):
    psi = 2 * math.pi * np.arange(n) / n
    return np.column_stack(
        [center[0] + radius * np.cos(psi), center[1] + radius * np.sin(psi)]
    ), np.arctan2(np.sin(psi), np.cos(psi))


class TestPhaseWaveS:
    def test_ring_with_matching_phases(self):
        x, psi = ring_positions(8)
        s_plus, s_minus = phase_wave_S(x, psi)
        assert s_minus == pytest.approx(1.0, rel=1e-12)
        assert s_plus == pytest.approx(0.0, abs=1e-12)

    def test_random_phases_decorrelate(self):
        rng = np.random.default_rng(12345)  # recorded Monte-Carlo seed
        x = rng.uniform(-1, 1, size=(300, 2))
        xi = rng.uniform(-math.pi, math.pi, 300)
        s_plus, s_minus = phase_wave_S(x, xi)
        assert s_plus < 0.2 and s_minus < 0.2

    def test_uniform_phases_on_ring(self):
        x, _ = ring_positions(12)
        s_plus, s_minus = phase_wave_S(x, np.full(12, 0.4))
        assert s_plus == pytest.approx(0.0, abs=1e-12)
        assert s_minus == pytest.approx(0.0, abs=1e-12)

    def test_centroid_agents_skipped(self):
        x, psi = ring_positions(8)
        x = np.vstack([x, [0.0, 0.0]])
        psi = np.append(psi, 2.0)
        # the centroid agent carries no angular position: S_minus stays 1
        assert phase_wave_S(x, psi)[1] == pytest.approx(1.0, rel=1e-12)

    def test_all_coincident_rejected(self):
        with pytest.raises(ValueError):
            phase_wave_S(np.zeros((5, 2)), np.zeros(5))

    def test_rotation_with_phase_shift_invariance(self):
        x, psi = ring_positions(16)
        alpha = 0.7
        rot = np.array(
            [[math.cos(alpha), -math.sin(alpha)], [math.sin(alpha), math.cos(alpha)]]
        )
        _, s_minus0 = phase_wave_S(x, psi)
        _, s_minus1 = phase_wave_S(x @ rot.T, psi + alpha)
        assert s_minus1 == pytest.approx(s_minus0, abs=1e-12)


class TestGradientScore:
    def test_linear_phase_ramp_scores_high(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(-1, 1, size=(400, 2))
        xi = 2.5 * x[:, 0]  # ramp along one axis
        assert gradient_score(x, xi) > 0.3

    def test_random_and_synced_phases_score_low(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-1, 1, size=(400, 2))
        assert gradient_score(x, rng.uniform(-math.pi, math.pi, 400)) < 0.15
        assert gradient_score(x, np.full(400, 1.1)) < 1e-12


class TestClusterCount:
    def test_single_point_cluster(self):
        assert cluster_count(np.zeros((5, 2)), np.zeros(5), 0.1, 0.1) == 1

    def test_two_separated_groups(self):
        x = np.array([[0.0, 0.0], [0.05, 0.0], [10.0, 0.0], [10.05, 0.0]])
        xi = np.zeros(4)
        assert cluster_count(x, xi, 0.1, 0.2) == 2

    def test_phase_split_within_one_spot(self):
        # three spatial groups, two sharing a phase but far apart: 3 clusters
        x = np.array([[0, 0], [5, 0], [10, 0]], dtype=float)
        xi = np.array([0.0, 1.0, 0.0])
        assert cluster_count(x, xi, 1.0, 0.2) == 3

    def test_monotone_in_both_tolerances(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(0, 1, size=(60, 2))
        xi = rng.uniform(-math.pi, math.pi, 60)
        a = cluster_count(x, xi, 0.05, 0.3)
        b = cluster_count(x, xi, 0.10, 0.3)
        c = cluster_count(x, xi, 0.10, 0.6)
        assert a >= b >= c

    def test_validates_eps(self):
        with pytest.raises(ValueError):
            cluster_count(np.zeros((2, 2)), np.zeros(2), 0.0, 0.1)

    def test_components_partition_agents(self):
        rng = np.random.default_rng(8)
        x = rng.uniform(0, 2, size=(50, 2))
        xi = rng.uniform(-math.pi, math.pi, 50)
        comps = phase_space_components(x, xi, 0.3, 0.5)
        members = np.sort(np.concatenate(comps))
        assert np.array_equal(members, np.arange(50))

    def test_coherence_separates_tight_groups_from_accidents(self):
        rng = np.random.default_rng(9)
        # two far-apart groups, each phase-tight
        x = np.vstack([rng.normal(0, 0.05, (20, 2)), rng.normal(5, 0.05, (20, 2))])
        xi = np.concatenate([np.full(20, 0.3), np.full(20, 2.1)])
        assert cluster_phase_coherence(x, xi, 0.5, 0.3) > 0.99
        # one spatial blob whose phases wrap the whole circle in a chain
        chain = np.linspace(-math.pi * 0.99, math.pi * 0.99, 40)
        x2 = np.column_stack([np.linspace(0, 1, 40), np.zeros(40)])
        assert cluster_phase_coherence(x2, chain, 0.2, 0.5) < 0.5


def synthetic_trajectory(model_id, states_xyz, times, params=None):
    """Build a Trajectory directly from (x, xi[, theta|v]) snapshots."""
    samples = []
    for snap in states_xyz:
        samples.append(pack_state(snap))
    first = states_xyz[0]
    return Trajectory(
        model_id=model_id,
        n=first.n,
        times=np.asarray(times, dtype=float),
        samples=np.array(samples),
        params=params or ModelParams(),
    )


class TestClassify:
    def make_frozen(self, x, xi, model=MODEL_BASELINE, n_samples=11, t_end=10.0):
        states = [
            SystemState(model, x=x, xi=xi, t=t)
            for t in np.linspace(0.0, t_end, n_samples)
        ]
        return synthetic_trajectory(model, states, np.linspace(0.0, t_end, n_samples))

    def test_frozen_synced_cluster(self):
        rng = np.random.default_rng(5)
        x = rng.uniform(-0.2, 0.2, size=(40, 2))
        xi = np.full(40, 0.3)
        traj = self.make_frozen(x, xi)
        assert classify(traj, window=2.0) == LABEL_STATIC_SYNC

    def test_frozen_ring_phase_wave(self):
        x, psi = ring_positions(40)
        traj = self.make_frozen(x, psi)
        assert classify(traj, window=2.0) == LABEL_STATIC_PHASE_WAVE

    def test_rotating_ring_is_active(self):
        # ring that rigidly circulates while phases stay locked to position
        n, t_end, samples = 40, 10.0, 21
        times = np.linspace(0.0, t_end, samples)
        states = []
        for t in times:
            psi0 = 2 * math.pi * np.arange(n) / n + 0.8 * t
            x = np.column_stack([np.cos(psi0), np.sin(psi0)])
            xi = np.arctan2(np.sin(psi0), np.cos(psi0))
            states.append(SystemState(MODEL_BASELINE, x=x, xi=xi))
        traj = synthetic_trajectory(MODEL_BASELINE, states, times)
        assert classify(traj, window=2.0) == LABEL_ACTIVE_PHASE_WAVE

    def test_splintered_groups(self):
        rng = np.random.default_rng(6)
        centers = np.array([[0, 0], [4, 0], [0, 4], [4, 4]], dtype=float)
        group_phases = [0.0, math.pi / 2, math.pi, -math.pi / 2]
        xs, xis = [], []
        for c, ph in zip(centers, group_phases):
            xs.append(c + rng.uniform(-0.1, 0.1, size=(10, 2)))
            xis.append(np.full(10, ph))
        x = np.vstack(xs)
        xi = np.concatenate(xis)
        traj = self.make_frozen(x, xi)
        label = classify(traj, window=2.0)
        assert label in ("splintered-phase-wave", "clustered")

    def test_too_short_trajectory_rejected(self):
        x = np.zeros((3, 2))
        traj = self.make_frozen(x, np.zeros(3), t_end=1.0)
        with pytest.raises(ValueError):
            classify(traj, window=2.0)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(-1, 1, (30, 2))
        xi = rng.uniform(-math.pi, math.pi, 30)
        traj = self.make_frozen(x, xi)
        assert classify(traj, window=2.0) == classify(traj, window=2.0)


class TestSummarize:
    def test_scs_summary_uses_velocity(self):
        st = SystemState(
            MODEL_SCS,
            x=[[0, 0], [1, 0]],
            v=[[0.3, 0.4], [0.3, 0.4]],
            xi=[0.2, 0.2],
        )
        s = summarize(st)
        assert s.mean_speed == pytest.approx(0.5, rel=1e-12)
        assert s.R_phase == pytest.approx(1.0, rel=1e-12)
        assert s.R_heading == pytest.approx(1.0, rel=1e-12)
        assert s.n_clusters in (1, 2)

    def test_sv_summary_heading(self):
        st = SystemState(
            MODEL_SV,
            x=[[0, 0], [1, 0], [0, 1]],
            theta=[0.5, 0.5, 0.5],
            xi=[0, math.pi, 0],
        )
        s = summarize(st)
        assert s.R_heading == pytest.approx(1.0, rel=1e-12)
        assert s.R_phase < 0.5
