"""
Consensus dynamics simulation.
Spectral solution of the free flow x' = -L_s x, fixed-step RK4 for the
leader-follower and influenced systems, and the bipartite consensus limit.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg

from config import SimulationConfig
from network.balance import detect_balance
from network.errors import (
    DimensionMismatchError,
    DisconnectedGraphError,
    NumericalError,
    UnreachableTargetError,
)
from network.graph_core import (
    InfluencedSystem,
    LeaderFollowerSystem,
    graph_fingerprint,
    is_connected,
)
from network.linalg import eigen_tolerance, symmetric_eigh
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/simulation.log')


@dataclass
class Trajectory:
    """
    Sampled state trajectory.

    states has one row per entry of times and one column per node.
    """
    times: np.ndarray
    states: np.ndarray
    nodes: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape != (len(self.times), len(self.nodes)):
            raise DimensionMismatchError(
                f"States shape {self.states.shape} does not match "
                f"{len(self.times)} samples x {len(self.nodes)} nodes"
            )
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory times must be strictly increasing")

    @property
    def final_state(self):
        return self.states[-1].copy()

    def to_frame(self):
        """DataFrame with column t followed by x_<node> per node"""
        frame = pd.DataFrame(self.states, columns=[f'x_{node}' for node in self.nodes])
        frame.insert(0, 't', self.times)
        return frame


@dataclass(frozen=True, eq=False)
class PiecewiseConstantInput:
    """
    Zero-order-hold input signal.

    values[k] is applied on [times[k], times[k+1]); the last value is held
    indefinitely. times must start at 0 and increase strictly.
    """
    times: tuple
    values: np.ndarray

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(len(times), -1) if times else values.reshape(0, 0)
        if not times or times[0] != 0.0:
            raise ValueError("Input breakpoints must start at t = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("Input breakpoints must increase strictly")
        if values.shape[0] != len(times):
            raise DimensionMismatchError(f"{values.shape[0]} input samples for {len(times)} breakpoints")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @classmethod
    def constant(cls, value):
        return cls(times=(0.0,), values=np.atleast_1d(np.asarray(value, dtype=float)).reshape(1, -1))

    @property
    def dimension(self):
        return self.values.shape[1]

    def __call__(self, t):
        k = int(np.searchsorted(self.times, t, side='right')) - 1
        return self.values[max(k, 0)]


def _coerce_state(x0, n):
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != n:
        raise DimensionMismatchError(f"Initial state has {x0.shape[0]} entries, expected {n}")
    return x0


def _time_grid(t_max, dt):
    if t_max <= 0 or dt <= 0:
        raise ValueError(f"t_max and dt must be positive (got {t_max}, {dt})")
    steps = max(1, math.ceil(t_max / dt - 1e-9))
    return np.linspace(0.0, t_max, steps + 1), t_max / steps


def default_step(g):
    """min(MAX_STEP, STEP_SCALE / lambda_max(L_s))"""
    values = symmetric_eigh(g.laplacian())[0]
    lam_max = float(values[-1]) if len(values) else 0.0
    if lam_max <= 0:
        return SimulationConfig.MAX_STEP
    return min(SimulationConfig.MAX_STEP, SimulationConfig.STEP_SCALE / lam_max)


def default_horizon(g):
    """HORIZON_SCALE over the smallest nonzero eigenvalue of L_s"""
    values = symmetric_eigh(g.laplacian())[0]
    positive = values[values > eigen_tolerance(values)]
    if positive.size == 0:
        return SimulationConfig.HORIZON_SCALE
    return SimulationConfig.HORIZON_SCALE / float(positive[0])


def simulate_free(g, x0, t_max=None, dt=None):
    """
    Sample x(t) = V exp(-Lambda t) V^T x0 for x' = -L_s x.

    Args:
        g: SignedGraph
        x0: Initial state, one entry per node
        t_max: Duration (default: default_horizon(g))
        dt: Sampling step (default: default_step(g))

    Returns:
        Trajectory
    """
    x0 = _coerce_state(x0, g.n)
    t_max = default_horizon(g) if t_max is None else t_max
    dt = default_step(g) if dt is None else dt
    times, h = _time_grid(t_max, dt)

    values, vectors = symmetric_eigh(g.laplacian())
    modal = vectors.T @ x0
    states = (np.exp(-np.outer(times, values)) * modal) @ vectors.T

    logger.debug(f"Free flow: {g.n} nodes, {len(times)} samples, dt={h:.3g}")
    return Trajectory(
        times=times,
        states=states,
        nodes=g.nodes,
        metadata={'graph': graph_fingerprint(g), 'integrator': 'spectral', 'dt': h},
    )


def _forced_blocks(sys):
    """(A, B, state nodes) so that x' = A x + B u"""
    if isinstance(sys, LeaderFollowerSystem):
        return -sys.floating_array(), -sys.input_array(), sys.floating_nodes
    if isinstance(sys, InfluencedSystem):
        return -sys.laplacian(), sys.input_matrix(), sys.graph.nodes
    raise TypeError(f"Unsupported system type: {type(sys).__name__}")


def _as_signal(u, q):
    if u is None:
        return PiecewiseConstantInput.constant(np.zeros(q))
    if isinstance(u, PiecewiseConstantInput) or callable(u):
        return u
    return PiecewiseConstantInput.constant(u)


def _rk4_advance(A, drive, x, h, substeps):
    step = h / substeps
    for _ in range(substeps):
        k1 = A @ x + drive
        k2 = A @ (x + 0.5 * step * k1) + drive
        k3 = A @ (x + 0.5 * step * k2) + drive
        k4 = A @ (x + step * k3) + drive
        x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def simulate_forced(sys, u=None, x0=None, t_max=None, dt=None):
    """
    Classical RK4 integration of a leader-follower or influenced system.

    The input is held constant over each step at its midpoint value. Every
    step is compared against two half-steps; the Richardson estimate must
    stay below LOCAL_ERROR_TOL per unit time, refining the substep count
    up to 2**MAX_HALVINGS.

    Args:
        sys: LeaderFollowerSystem (x' = -A_s^f x - B_s^f u) or InfluencedSystem (x' = -L_s x + B u)
        u: None (zero input), constant vector, PiecewiseConstantInput or callable t -> vector
        x0: Initial state (default: zero)
        t_max: Duration (default: default_horizon of the graph)
        dt: Step (default: default_step of the graph)

    Returns:
        Trajectory over the system's state nodes
    """
    A, B, nodes = _forced_blocks(sys)
    n, q = B.shape
    x = np.zeros(n) if x0 is None else _coerce_state(x0, n)
    signal = _as_signal(u, q)
    t_max = default_horizon(sys.graph) if t_max is None else t_max
    dt = default_step(sys.graph) if dt is None else dt
    times, h = _time_grid(t_max, dt)

    values = symmetric_eigh(-A)[0]
    lam_max = float(np.max(np.abs(values))) if len(values) else 0.0
    if h * lam_max > SimulationConfig.RK4_STABILITY_LIMIT:
        raise NumericalError(
            f"Step {h:.3g} unstable for lambda_max {lam_max:.3g} "
            f"(h * lambda_max must not exceed {SimulationConfig.RK4_STABILITY_LIMIT})"
        )

    max_substeps = 2 ** SimulationConfig.MAX_HALVINGS
    substeps = 1
    states = np.empty((len(times), n))
    states[0] = x
    for k in range(len(times) - 1):
        u_k = np.atleast_1d(np.asarray(signal(times[k] + 0.5 * h), dtype=float))
        if u_k.shape != (q,):
            raise DimensionMismatchError(f"Input sample has shape {u_k.shape}, expected ({q},)")
        drive = B @ u_k
        while True:
            coarse = _rk4_advance(A, drive, x, h, substeps)
            fine = _rk4_advance(A, drive, x, h, 2 * substeps)
            estimate = float(np.linalg.norm(fine - coarse)) / 15.0
            if estimate <= SimulationConfig.LOCAL_ERROR_TOL * h * max(1.0, float(np.linalg.norm(x))):
                break
            substeps *= 2
            if substeps > max_substeps:
                raise NumericalError(
                    f"Local error {estimate:.3g} above tolerance at t={times[k]:.6g} "
                    f"after {SimulationConfig.MAX_HALVINGS} halvings"
                )
            logger.debug(f"Refining to {substeps} substeps at t={times[k]:.6g}")
        x = fine
        states[k + 1] = x

    logger.info(f"Forced simulation: {n} states, {q} inputs, {len(times) - 1} steps, {substeps} substeps")
    return Trajectory(
        times=times,
        states=states,
        nodes=tuple(nodes),
        metadata={
            'graph': graph_fingerprint(sys.graph),
            'integrator': 'rk4',
            'dt': h,
            'substeps': substeps,
        },
    )


def bipartite_limit(g, x0):
    """
    Limit of the free flow: (1/n)(1^T G_t x0) G_t 1 when balanced, zero otherwise.

    Raises:
        DisconnectedGraphError: if g is not connected
    """
    x0 = _coerce_state(x0, g.n)
    if not is_connected(g):
        raise DisconnectedGraphError("Bipartite consensus limit needs a connected graph")
    result = detect_balance(g)
    if not result.balanced:
        return np.zeros(g.n)
    sigma = np.array(result.gauge.aligned(g), dtype=float)
    return (sigma @ x0) / g.n * sigma


def disagreement_energy(g, trajectory):
    """x^T L_s x at every sample of a full-state trajectory"""
    if trajectory.states.shape[1] != g.n:
        raise DimensionMismatchError(
            f"Trajectory has {trajectory.states.shape[1]} states, graph has {g.n} nodes"
        )
    X = trajectory.states
    return np.einsum('ki,ij,kj->k', X, g.laplacian(), X)


def _zoh_discretization(A, B, h):
    n, q = B.shape
    M = np.zeros((n + q, n + q))
    M[:n, :n] = A
    M[:n, n:] = B
    E = scipy.linalg.expm(M * h)
    return E[:n, :n], E[:n, n:]


def steer_to(sys, target, t_max, steps=50):
    """
    Least-norm zero-order-hold input driving the system from rest to target.

    Args:
        sys: LeaderFollowerSystem or InfluencedSystem
        target: Desired state at t_max
        t_max: Horizon
        steps: Number of equal hold intervals

    Returns:
        PiecewiseConstantInput

    Raises:
        UnreachableTargetError: target has a component outside the reachable subspace
    """
    A, B, _ = _forced_blocks(sys)
    n, q = B.shape
    target = _coerce_state(target, n)
    if t_max <= 0 or steps < 1:
        raise ValueError(f"t_max must be positive and steps at least 1 (got {t_max}, {steps})")
    h = t_max / steps
    A_d, B_d = _zoh_discretization(A, B, h)

    # x_N = sum_k A_d^(N-1-k) B_d u_k
    blocks = []
    power = np.eye(n)
    for _ in range(steps):
        blocks.append(power @ B_d)
        power = A_d @ power
    R = np.hstack(blocks[::-1])
    solution = scipy.linalg.lstsq(R, target, cond=SimulationConfig.STEER_RCOND)[0]

    residual = float(np.linalg.norm(R @ solution - target))
    if residual > SimulationConfig.STEER_TOL * max(1.0, float(np.linalg.norm(target))):
        raise UnreachableTargetError(f"Target not reachable: residual {residual:.3g}")
    logger.info(f"Steering input over {steps} intervals, peak |u| = {np.max(np.abs(solution)):.3g}")
    return PiecewiseConstantInput(
        times=tuple(np.linspace(0.0, t_max, steps + 1)[:-1]),
        values=solution.reshape(steps, q),
    )
