"""Helmholtz-Kirchhoff point-vortex system: right-hand side, RK4 stepping,
and first-integral monitoring (Hamiltonian, linear and angular impulse).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollisionError
from .integrators import rk4_positions
from .kernels import KernelParams, direct_velocity, min_pairwise_distance

_EXACT = KernelParams(blob_radius=0.0)


@dataclass(frozen=True)
class PointVortexState:
    xy: np.ndarray      # (n, 2) vortex positions
    a: np.ndarray       # (n,) nonzero intensities
    t: float = 0.0

    def __post_init__(self):
        xy = np.ascontiguousarray(np.asarray(self.xy, dtype=np.float64))
        a = np.ascontiguousarray(np.asarray(self.a, dtype=np.float64))
        if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] < 1:
            raise ValueError("positions must have shape (n, 2), n >= 1")
        if a.shape != (xy.shape[0],):
            raise ValueError("intensities must match positions")
        if (a == 0.0).any():
            raise ValueError("intensities must be nonzero")
        if not (np.isfinite(xy).all() and np.isfinite(a).all()):
            raise ValueError("state contains non-finite values")
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.xy.shape[0]


@dataclass
class CollisionReport:
    pair: tuple[int, int]
    time: float
    distance: float


@dataclass
class PVTrajectory:
    times: np.ndarray            # (s,)
    positions: np.ndarray        # (s, n, 2)
    intensities: np.ndarray      # (n,)
    hamiltonian: np.ndarray      # (s,)
    linear_impulse: np.ndarray   # (s, 2)
    angular_impulse: np.ndarray  # (s,)
    min_separation: np.ndarray   # (s,)
    collision: CollisionReport | None = None

    @property
    def final_state(self) -> PointVortexState:
        return PointVortexState(self.positions[-1], self.intensities,
                                float(self.times[-1]))


def pv_rhs(state: PointVortexState) -> np.ndarray:
    """dY_i/dt = sum_{j != i} a_j K(Y_i - Y_j); errors on coincident pairs."""
    return direct_velocity(state.xy, state.a, None, _EXACT,
                           self_interaction=True)


def _closest_pair(xy):
    n = xy.shape[0]
    best = (np.inf, (0, 0))
    for i in range(n):
        d = np.hypot(xy[i, 0] - xy[i + 1:, 0], xy[i, 1] - xy[i + 1:, 1])
        if d.size:
            j = int(np.argmin(d))
            if d[j] < best[0]:
                best = (float(d[j]), (i, i + 1 + j))
    return best


def pv_step(state: PointVortexState, dt: float,
            collision_floor: float = 0.0) -> PointVortexState:
    """One RK4 step; raises CollisionError if any stage brings a pair below
    the collision floor."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    def rhs(xy):
        if collision_floor > 0.0 and state.n >= 2:
            sep = min_pairwise_distance(xy)
            if sep < collision_floor:
                d, pair = _closest_pair(xy)
                raise CollisionError(pair, state.t, d)
        return pv_rhs(PointVortexState(xy, state.a, state.t))

    new_xy = rk4_positions(state.xy, dt, rhs)
    return PointVortexState(new_xy, state.a, state.t + dt)


def pv_integrate(state: PointVortexState, dt: float, t_end: float,
                 sample_every: int = 1,
                 collision_floor: float = 0.0) -> PVTrajectory:
    """Fixed-step integration with snapshots every ``sample_every`` steps and
    conserved-quantity series; stops early with a collision report when the
    separation floor is crossed."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end <= state.t:
        raise ValueError("t_end must exceed the state time")
    sample_every = max(1, int(sample_every))

    n_steps = int(round((t_end - state.t) / dt))
    times = [state.t]
    snaps = [state.xy.copy()]
    collision = None
    current = state
    for k in range(1, n_steps + 1):
        try:
            current = pv_step(current, dt, collision_floor)
        except CollisionError as exc:
            collision = CollisionReport(exc.pair, exc.time, exc.distance)
            break
        if k % sample_every == 0 or k == n_steps:
            times.append(current.t)
            snaps.append(current.xy.copy())

    times = np.asarray(times)
    positions = np.asarray(snaps)
    ham = np.empty(times.shape[0])
    lin = np.empty((times.shape[0], 2))
    ang = np.empty(times.shape[0])
    sep = np.empty(times.shape[0])
    for s in range(times.shape[0]):
        st = PointVortexState(positions[s], state.a, times[s])
        ham[s] = pv_hamiltonian(st)
        lin[s], ang[s] = pv_impulses(st)
        sep[s] = pv_min_separation(st)
    return PVTrajectory(times, positions, state.a.copy(), ham, lin, ang, sep,
                        collision)


def pv_hamiltonian(state: PointVortexState) -> float:
    """H = -(1/2 pi) sum_{i<j} a_i a_j log |Y_i - Y_j|."""
    xy = state.xy
    a = state.a
    h = 0.0
    for i in range(state.n):
        dx = xy[i, 0] - xy[i + 1:, 0]
        dy = xy[i, 1] - xy[i + 1:, 1]
        r2 = dx * dx + dy * dy
        if (r2 == 0.0).any():
            raise CollisionError((i, i + 1 + int(np.argmin(r2))), state.t, 0.0)
        h += float(np.sum(a[i] * a[i + 1:] * np.log(r2)))
    return -h / (4.0 * np.pi)


def pv_impulses(state: PointVortexState):
    """Linear impulse sum a_i Y_i and angular impulse sum a_i |Y_i|^2."""
    lin = state.a @ state.xy
    ang = float(np.sum(state.a * np.sum(state.xy * state.xy, axis=1)))
    return lin, ang


def pv_min_separation(state: PointVortexState) -> float:
    """Minimum pairwise distance; +inf for a single vortex."""
    if state.n < 2:
        return np.inf
    return min_pairwise_distance(state.xy)
