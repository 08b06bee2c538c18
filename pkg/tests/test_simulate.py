"""
Tests for free and forced consensus dynamics, limits and steering.
"""
import numpy as np
import pytest
import scipy.linalg

from network.errors import (
    DimensionMismatchError,
    DisconnectedGraphError,
    NumericalError,
    UnreachableTargetError,
)
from network.generators import gauge_graph
from network.graph_core import build_graph, influenced_system, leader_follower_split
from network.simulate import (
    PiecewiseConstantInput,
    Trajectory,
    bipartite_limit,
    default_horizon,
    default_step,
    disagreement_energy,
    simulate_forced,
    simulate_free,
    steer_to,
)

ONES = np.ones(4)


class TestFreeFlow:

    def test_balanced_limit(self, ga):
        traj = simulate_free(ga, ONES, t_max=20.0, dt=0.01)
        assert np.allclose(traj.final_state, [0.5, 0.5, 0.5, -0.5], atol=1e-12)
        assert np.allclose(bipartite_limit(ga, ONES), [0.5, 0.5, 0.5, -0.5])
        assert traj.metadata['integrator'] == 'spectral'

    def test_unbalanced_decays(self, gb):
        traj = simulate_free(gb, [1.0, -2.0, 3.0, 0.5])
        assert np.linalg.norm(traj.final_state) < 1e-9
        assert np.array_equal(bipartite_limit(gb, ONES), np.zeros(4))

    def test_gauge_conjugacy(self, ga):
        sigma = (1, -1, -1, 1)
        G = np.diag(sigma).astype(float)
        x0 = np.array([0.3, -1.0, 2.0, 0.7])
        base = simulate_free(ga, x0, t_max=1.0, dt=0.05)
        flipped = simulate_free(gauge_graph(ga, sigma), G @ x0, t_max=1.0, dt=0.05)
        assert np.allclose(flipped.states, base.states @ G, atol=1e-12)

    def test_energy_non_increasing(self, gb):
        traj = simulate_free(gb, [1.0, 0.0, -1.0, 2.0], t_max=3.0, dt=0.01)
        energy = disagreement_energy(gb, traj)
        assert np.all(np.diff(energy) <= 1e-12)
        assert energy[0] > 0

    def test_grid_snaps_to_horizon(self, ga):
        traj = simulate_free(ga, ONES, t_max=1.0, dt=0.3)
        assert len(traj.times) == 5
        assert traj.metadata['dt'] == pytest.approx(0.25)
        assert traj.times[-1] == 1.0

    def test_defaults(self, ga):
        assert default_step(ga) == pytest.approx(0.01)
        assert default_horizon(ga) == pytest.approx(25.0)

    def test_bad_initial_state(self, ga):
        with pytest.raises(DimensionMismatchError):
            simulate_free(ga, [1.0, 2.0])

    def test_bad_grid(self, ga):
        with pytest.raises(ValueError):
            simulate_free(ga, ONES, t_max=-1.0, dt=0.1)

    def test_limit_needs_connected_graph(self):
        g = build_graph(['a', 'b', 'c'], [('a', 'b', 1)])
        with pytest.raises(DisconnectedGraphError):
            bipartite_limit(g, np.ones(3))


class TestForcedFlow:

    def test_zero_input_matches_spectral(self, ga):
        x0 = np.array([1.0, -0.5, 2.0, 0.25])
        rk = simulate_forced(influenced_system(ga, ['4']), x0=x0, t_max=2.0, dt=0.01)
        exact = simulate_free(ga, x0, t_max=2.0, dt=0.01)
        assert np.max(np.abs(rk.states - exact.states)) < 1e-7
        assert rk.metadata['integrator'] == 'rk4'
        assert rk.metadata['substeps'] >= 1

    def test_leader_follower_zero_input(self, ga):
        sys = leader_follower_split(ga, ['4'])
        x0 = np.array([1.0, 2.0, 3.0])
        traj = simulate_forced(sys, x0=x0, t_max=1.0, dt=0.01)
        expected = scipy.linalg.expm(-sys.floating_array()) @ x0
        assert np.allclose(traj.final_state, expected, atol=1e-7)
        assert traj.nodes == ('1', '2', '3')

    def test_constant_leader_steady_state(self, ga):
        # A^f (1, 1, 1) = (1, 1, 1) and B^f = (1, 1, 1)
        sys = leader_follower_split(ga, ['4'])
        traj = simulate_forced(sys, u=[1.0], t_max=30.0, dt=0.01)
        assert np.allclose(traj.final_state, [-1.0, -1.0, -1.0], atol=1e-9)

    def test_reachable_set_stays_symmetric(self, ga):
        sys = influenced_system(ga, ['4'])
        traj = simulate_forced(sys, u=lambda t: np.array([np.sin(3 * t)]), t_max=3.0, dt=0.01)
        assert np.max(np.abs(traj.states[:, 0] - traj.states[:, 2])) < 1e-10

    def test_unstable_step_rejected(self, ga):
        with pytest.raises(NumericalError):
            simulate_forced(influenced_system(ga, ['4']), x0=ONES, t_max=2.0, dt=1.0)

    def test_input_dimension_checked(self, ga):
        with pytest.raises(DimensionMismatchError):
            simulate_forced(influenced_system(ga, ['4']), u=[1.0, 2.0], t_max=0.1, dt=0.01)

    def test_unsupported_system(self, ga):
        with pytest.raises(TypeError):
            simulate_forced(ga)


class TestSteering:

    def test_steer_controllable_graph(self, gb):
        sys = influenced_system(gb, ['4'])
        target = np.array([1.0, -1.0, 0.5, 2.0])
        u = steer_to(sys, target, t_max=4.0, steps=40)
        assert u.dimension == 1
        assert len(u.times) == 40
        traj = simulate_forced(sys, u=u, t_max=4.0, dt=0.01)
        assert np.allclose(traj.final_state, target, atol=1e-4)

    def test_uncontrollable_direction_unreachable(self, ga):
        sys = influenced_system(ga, ['4'])
        with pytest.raises(UnreachableTargetError):
            steer_to(sys, [1.0, 0.0, -1.0, 0.0], t_max=2.0, steps=20)

    def test_symmetric_target_reachable(self, ga):
        sys = influenced_system(ga, ['4'])
        u = steer_to(sys, [0.2, 0.2, 0.2, -0.4], t_max=2.0, steps=20)
        assert u.values.shape == (20, 1)

    def test_invalid_horizon(self, gb):
        with pytest.raises(ValueError):
            steer_to(influenced_system(gb, ['4']), ONES, t_max=0.0)


class TestSignalsAndTrajectories:

    def test_piecewise_lookup(self):
        u = PiecewiseConstantInput(times=(0.0, 1.0), values=[1.0, 2.0])
        assert u(0.5).tolist() == [1.0]
        assert u(1.0).tolist() == [2.0]
        assert u(7.0).tolist() == [2.0]
        assert u.dimension == 1

    def test_piecewise_validation(self):
        with pytest.raises(ValueError):
            PiecewiseConstantInput(times=(0.5, 1.0), values=[1.0, 2.0])
        with pytest.raises(ValueError):
            PiecewiseConstantInput(times=(0.0, 0.0), values=[1.0, 2.0])
        with pytest.raises(DimensionMismatchError):
            PiecewiseConstantInput(times=(0.0, 1.0), values=[[1.0], [2.0], [3.0]])

    def test_constant_signal(self):
        u = PiecewiseConstantInput.constant([1.0, -1.0])
        assert u(123.0).tolist() == [1.0, -1.0]

    def test_trajectory_validation(self):
        with pytest.raises(DimensionMismatchError):
            Trajectory(times=[0.0, 1.0], states=np.zeros((2, 3)), nodes=('a', 'b'))
        with pytest.raises(ValueError):
            Trajectory(times=[0.0, 0.0], states=np.zeros((2, 1)), nodes=('a',))

    def test_to_frame(self, ga):
        frame = simulate_free(ga, ONES, t_max=0.1, dt=0.05).to_frame()
        assert list(frame.columns) == ['t', 'x_1', 'x_2', 'x_3', 'x_4']
        assert len(frame) == 3
        assert frame['t'].iloc[0] == 0.0

    def test_energy_needs_full_state(self, ga):
        sys = leader_follower_split(ga, ['4'])
        traj = simulate_forced(sys, x0=np.ones(3), t_max=0.1, dt=0.01)
        with pytest.raises(DimensionMismatchError):
            disagreement_energy(ga, traj)
