"""Paired PDE/ODE runs and concentration-scale sweeps.

A pairing run advances the particle cloud and the point-vortex system with
synchronized steps and records, at a fixed cadence, every tracked distance:
per component the root second moments about the matching point vortex and
about the vorticity center, the center/point gap and the velocity gap, outer
and smoothed mass fractions; globally the signed 1-Wasserstein distance to
the point-vortex measure and both minimum separations.  A sweep repeats the
run over a decreasing list of concentration scales with the sampling pitch
proportional to the scale, then fits log-log rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cloud import ParticleCloud
from .errors import CollisionError, DegenerateInputError
from .initial_data import InitialDataSpec, sample_initial_cloud
from .kernels import KernelParams
from .measures import AtomicMeasure, w1_signed
from .metrics import (CutoffSpec, center_of_vorticity, center_velocity,
                      cloud_as_measure, grid_density, outer_mass,
                      smoothed_outer_mass, tail_velocity_bound_check,
                      w2_to_dirac)
from .pointvortex import PointVortexState, pv_min_separation, pv_rhs, pv_step
from .vpm import (component_support_distance, support_distance_lower_bound,
                  vpm_step)

# an offset this large keeps the initial second moment about the offset
# point below the concentration scale: 1/3 + 0.8^2 < 1
MAX_OFFSET_FRACTION = 0.8


@dataclass(frozen=True)
class Numerics:
    """Run-level numerical knobs shared by all modes."""

    dt: float = 1e-3
    horizon: float = 5.0
    particles_per_core: int = 24     # sampling pitch h = epsilon / this
    blob_radius_factor: float = 2.0  # delta_b = factor * h
    opening_angle: float = 0.5
    direct_crossover: int = 2000
    leaf_size: int = 16
    deterministic: bool = True
    seed: int = 0
    record_every: int = 0            # steps between records; 0 = auto
    dt_core_fraction: float = 0.35   # cap dt at fraction * pi * eps^2 / amax
    collision_floor_factor: float = 0.25  # floor = factor * separation
    pv_offset_fraction: float = 0.0  # |Y_i(0) - center_i| = fraction * eps

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if self.particles_per_core < 4:
            raise ValueError("particles_per_core must be at least 4")
        if self.blob_radius_factor < 0.0:
            raise ValueError("blob_radius_factor must be nonnegative")
        if not 0.0 <= self.pv_offset_fraction <= MAX_OFFSET_FRACTION:
            raise ValueError(
                f"pv_offset_fraction must lie in [0, {MAX_OFFSET_FRACTION}]")

    def kernel_params(self, blob_radius) -> KernelParams:
        return KernelParams(blob_radius=blob_radius,
                            opening_angle=self.opening_angle,
                            deterministic=self.deterministic,
                            direct_crossover=self.direct_crossover,
                            leaf_size=self.leaf_size)


@dataclass
class DiagnosticsRecord:
    t: float
    x_centers: np.ndarray   # (n, 2) vorticity centers
    y_centers: np.ndarray   # (n, 2) point vortices
    w2_pv: np.ndarray       # (n,) second-moment root about Y_i
    w2_center: np.ndarray   # (n,) second-moment root about X_i
    center_gap: np.ndarray  # (n,) |X_i - Y_i|
    vel_gap: np.ndarray     # (n,) |dX_i/dt - dY_i/dt|
    m_r: np.ndarray         # (n,) outer mass beyond R
    m_2r: np.ndarray        # (n,) outer mass beyond 2R
    mu: np.ndarray          # (n,) smoothed outer mass at (2R - R/8, R/8)
    w1_total: float
    min_sep_cloud: float
    min_sep_pv: float

    @property
    def n_components(self) -> int:
        return self.w2_pv.shape[0]


@dataclass
class PairingRun:
    records: list
    spec: InitialDataSpec
    dt: float
    pitch: float
    blob_radius: float
    n_particles: int
    separation_time: float | None = None     # support distance halved
    pv_separation_time: float | None = None  # point-vortex bound failed
    collision_time: float | None = None
    reached_horizon: bool = False
    initial_cloud: ParticleCloud | None = None
    gronwall: list | None = None             # filled by run_sweep
    threshold: ThresholdMonitor | None = None

    @property
    def stop_time(self) -> float:
        return float(self.records[-1].t)


@dataclass
class RateFit:
    slope: float
    intercept: float
    residual: float


@dataclass
class GronwallFit:
    growth_rate: float
    prefactor: float
    residual: float


@dataclass
class ThresholdMonitor:
    """First time the outer mass beyond 2R reaches the eps^alpha level, with
    alpha = p * gamma / (p - 2); None when it never does.  Also carries the
    per-record concentration ceiling w2_center^2 / (2R)^2."""

    alpha: float
    level: float
    crossing_times: list
    ceiling: np.ndarray      # (n_records, n_components)
    outer_series: np.ndarray  # (n_records, n_components)


@dataclass
class SweepResult:
    epsilons: list
    runs: list
    sup: dict = field(default_factory=dict)    # family -> (n_eps, n_comp)
    fits: dict = field(default_factory=dict)   # family -> list[RateFit]
    tail_ratios: list = field(default_factory=list)


_FAMILIES = ("w2_pv", "w2_center", "center_gap", "vel_gap")


def _pv_initial_positions(spec: InitialDataSpec, offset_fraction: float):
    y0 = spec.centers.copy()
    if offset_fraction > 0.0:
        for i in range(spec.n_components):
            sign = 1.0 if i % 2 == 0 else -1.0
            y0[i, 1] += sign * offset_fraction * spec.epsilon
    return y0


def _run_dt(spec: InitialDataSpec, num: Numerics) -> float:
    dt = num.dt
    if num.dt_core_fraction > 0.0:
        amax = float(np.max(np.abs(spec.intensities)))
        core = num.dt_core_fraction * np.pi * spec.epsilon ** 2 / amax
        dt = min(dt, core)
    return dt


def diagnose(cloud: ParticleCloud, pv: PointVortexState,
             spec: InitialDataSpec, params: KernelParams) -> DiagnosticsRecord:
    n = spec.n_components
    big_r = spec.support_radius
    band = big_r / 8.0

    x_centers = np.empty((n, 2))
    w2_pv = np.empty(n)
    w2_center = np.empty(n)
    center_gap = np.empty(n)
    vel_gap = np.empty(n)
    m_r = np.empty(n)
    m_2r = np.empty(n)
    mu = np.empty(n)

    dy_dt = pv_rhs(pv)
    for i in range(n):
        x_i = center_of_vorticity(cloud, i)
        x_centers[i] = x_i
        y_i = pv.xy[i]
        w2_pv[i] = w2_to_dirac(cloud, y_i, i)
        w2_center[i] = w2_to_dirac(cloud, x_i, i)
        center_gap[i] = float(np.hypot(*(x_i - y_i)))
        dx_dt = center_velocity(cloud, i, params)
        vel_gap[i] = float(np.hypot(*(dx_dt - dy_dt[i])))
        m_r[i] = outer_mass(cloud, i, big_r, center=x_i)
        m_2r[i] = outer_mass(cloud, i, 2.0 * big_r, center=x_i)
        cut = CutoffSpec(rho=2.0 * big_r - band, band=band, center=x_i)
        mu[i] = smoothed_outer_mass(cloud, i, cut)

    w1_total = w1_signed(cloud_as_measure(cloud),
                         AtomicMeasure(pv.xy.copy(), pv.a.copy()))
    return DiagnosticsRecord(
        t=cloud.time, x_centers=x_centers, y_centers=pv.xy.copy(),
        w2_pv=w2_pv, w2_center=w2_center, center_gap=center_gap,
        vel_gap=vel_gap, m_r=m_r, m_2r=m_2r, mu=mu, w1_total=w1_total,
        min_sep_cloud=component_support_distance(cloud),
        min_sep_pv=pv_min_separation(pv))


def run_pairing_detailed(spec: InitialDataSpec, num: Numerics) -> PairingRun:
    pitch = spec.epsilon / num.particles_per_core
    cloud = sample_initial_cloud(spec, pitch,
                                 blob_radius=num.blob_radius_factor * pitch)
    pv = PointVortexState(_pv_initial_positions(spec, num.pv_offset_fraction),
                          spec.intensities.copy())
    params = num.kernel_params(cloud.blob_radius)
    floor = num.collision_floor_factor * spec.separation
    threshold = spec.separation / 2.0

    dt = _run_dt(spec, num)
    steps = max(1, int(np.ceil(num.horizon / dt - 1e-12)))
    dt = num.horizon / steps
    record_every = num.record_every or max(1, steps // 24)

    run = PairingRun(records=[diagnose(cloud, pv, spec, params)], spec=spec,
                     dt=dt, pitch=pitch, blob_radius=cloud.blob_radius,
                     n_particles=cloud.n_particles, initial_cloud=cloud)

    for k in range(1, steps + 1):
        cloud = vpm_step(cloud, dt, params)
        try:
            pv = pv_step(pv, dt, collision_floor=floor)
        except CollisionError:
            run.collision_time = cloud.time
            break

        stop = False
        if pv.n >= 2 and pv_min_separation(pv) < threshold:
            run.pv_separation_time = cloud.time
            stop = True
        if cloud.n_components >= 2 and \
                support_distance_lower_bound(cloud) < threshold:
            if component_support_distance(cloud) < threshold:
                run.separation_time = cloud.time
                stop = True
        if stop or k % record_every == 0 or k == steps:
            run.records.append(diagnose(cloud, pv, spec, params))
        if stop:
            break
    else:
        run.reached_horizon = True
    return run


def run_pairing(spec: InitialDataSpec, num: Numerics) -> list:
    """Synchronized cloud/point-vortex run; the sequence of records."""
    return run_pairing_detailed(spec, num).records


def fit_rate(pairs) -> RateFit:
    """Ordinary least squares of log(value) against log(scale)."""
    pairs = [(float(e), float(v)) for e, v in pairs]
    if len(pairs) < 2:
        raise DegenerateInputError("rate fit needs at least two points")
    if any(v <= 0.0 for _, v in pairs) or any(e <= 0.0 for e, _ in pairs):
        raise DegenerateInputError("rate fit needs positive scales and values")
    x = np.log([e for e, _ in pairs])
    y = np.log([v for _, v in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return RateFit(float(slope), float(intercept),
                   float(np.sqrt(np.mean(resid * resid))))


def fit_gronwall(records, component: int) -> GronwallFit:
    """Least squares of log w2_center(t) against t; the slope is the fitted
    exponential growth rate of the concentration radius."""
    if not records:
        raise DegenerateInputError("no records to fit")
    t = np.array([r.t for r in records])
    w = np.array([r.w2_center[component] for r in records])
    if (w <= 0.0).any():
        raise DegenerateInputError("w2_center must be positive to fit")
    if len(records) < 2 or np.ptp(t) == 0.0:
        raise DegenerateInputError("gronwall fit needs at least two times")
    rate, intercept = np.polyfit(t, np.log(w), 1)
    resid = np.log(w) - (rate * t + intercept)
    return GronwallFit(float(rate), float(np.exp(intercept)),
                       float(np.sqrt(np.mean(resid * resid))))


def threshold_monitor(records, spec: InitialDataSpec) -> ThresholdMonitor:
    p = spec.p_exponent
    alpha = p * spec.scaling_exponent / (p - 2.0)
    level = spec.epsilon ** alpha
    n = spec.n_components
    outer = np.array([r.m_2r for r in records])
    ceiling = np.array([
        (r.w2_center / (2.0 * spec.support_radius)) ** 2 for r in records])
    crossing = []
    for i in range(n):
        hits = [r.t for r, m in zip(records, outer[:, i]) if m >= level]
        crossing.append(hits[0] if hits else None)
    return ThresholdMonitor(alpha=float(alpha), level=float(level),
                            crossing_times=crossing, ceiling=ceiling,
                            outer_series=outer)


def tail_bound_ratio(cloud: ParticleCloud, spec: InitialDataSpec,
                     component: int = 0) -> float:
    """Monitored ratio of the tail kernel integral to its interpolation
    bound, on the component's own scale: the field beyond eps/2 of the
    center, evaluated at distance eps (empty-tail geometries are useless
    here, so the probe scales with the concentration radius)."""
    x_c = center_of_vorticity(cloud, component)
    dens, origin = grid_density(cloud, component)
    length = spec.epsilon
    nx, ny = dens.shape
    cx = origin[0] + (np.arange(nx) + 0.5) * cloud.pitch
    cy = origin[1] + (np.arange(ny) + 0.5) * cloud.pitch
    dist = np.hypot(cx[:, None] - x_c[0], cy[None, :] - x_c[1])
    tail = np.where(dist >= 0.5 * length, dens, 0.0)
    x_eval = x_c + np.array([length, 0.0])
    i2, bound = tail_velocity_bound_check(tail, cloud.pitch, origin, x_eval,
                                          spec.p_exponent)
    if bound == 0.0:
        return np.nan
    return i2 / bound


def run_sweep(base_spec: InitialDataSpec, epsilons, num: Numerics) -> SweepResult:
    """Pairing runs across strictly decreasing concentration scales with the
    pitch tied to the scale, plus log-log rate fits of the sup-over-time
    distances.  A single-scale list yields sups only (no fit)."""
    epsilons = [float(e) for e in epsilons]
    if not epsilons:
        raise DegenerateInputError("sweep needs at least one scale")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if any(e > base_spec.support_radius for e in epsilons):
        raise ValueError("every epsilon must be at most the support radius")

    n = base_spec.n_components
    result = SweepResult(epsilons=epsilons, runs=[])
    for eps in epsilons:
        spec = replace(base_spec, epsilon=eps,
                       scaling_exponent=base_spec.scaling_exponent)
        run = run_pairing_detailed(spec, num)
        run.gronwall = [fit_gronwall(run.records, i) for i in range(n)]
        run.threshold = threshold_monitor(run.records, spec)
        result.tail_ratios.append(tail_bound_ratio(run.initial_cloud, spec))
        result.runs.append(run)

    for family in _FAMILIES:
        table = np.array([
            [max(getattr(r, family)[i] for r in run.records)
             for i in range(n)]
            for run in result.runs])
        result.sup[family] = table
    result.sup["w1_total"] = np.array(
        [max(r.w1_total for r in run.records) for run in result.runs])

    if len(epsilons) >= 2:
        for family in _FAMILIES:
            result.fits[family] = [
                fit_rate(zip(epsilons, result.sup[family][:, i]))
                for i in range(n)]
        result.fits["w1_total"] = [
            fit_rate(zip(epsilons, result.sup["w1_total"]))]
    return result
