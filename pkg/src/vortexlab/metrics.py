"""Per-component diagnostics: vorticity centers and their velocities,
root-normalized second moments against a point (the 2-Wasserstein distance to
a Dirac), outer and cutoff-smoothed mass fractions, and the rearrangement /
tail-integral machinery used to monitor the far-field velocity bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import ParticleCloud
from .errors import MixedSignError, ZeroIntensityError
from .kernels import KernelParams, direct_velocity
from .measures import AtomicMeasure


def _component(cloud: ParticleCloud, i: int):
    idx = cloud.component_indices(i)
    if idx.size == 0:
        raise ValueError(f"component {i} not present")
    a = cloud.intensity(i)
    if a == 0.0:
        raise ZeroIntensityError(f"component {i} has zero intensity")
    return idx, a


def center_of_vorticity(cloud: ParticleCloud, i: int) -> np.ndarray:
    """Circulation-weighted mean position of component i (the minimizer of
    the component's second moment)."""
    idx, a = _component(cloud, i)
    return (cloud.gamma[idx] @ cloud.xy[idx]) / a


def center_velocity(cloud: ParticleCloud, i: int,
                    params: KernelParams | None = None) -> np.ndarray:
    """Velocity of the center of component i: the exact double sum of kernel
    interactions with the *other* components only.  The self-component term
    cancels pairwise by antisymmetry, so omitting it enforces the identity
    structurally (uses the cloud's blob radius, exact kernel when zero)."""
    params = params or KernelParams()
    idx, a = _component(cloud, i)
    others = np.flatnonzero(cloud.tag != i)
    if others.size == 0:
        return np.zeros(2)
    p = params.with_blob(cloud.blob_radius)
    u_far = direct_velocity(cloud.xy[others], cloud.gamma[others],
                            cloud.xy[idx], p)
    return (cloud.gamma[idx] @ u_far) / a


def w2_to_dirac(source, target, component: int | None = None) -> float:
    """Root normalized second moment about the target point: the
    2-Wasserstein distance between the normalized component (or single-signed
    measure) and a Dirac at the target."""
    target = np.asarray(target, dtype=np.float64)
    if isinstance(source, ParticleCloud):
        if component is None:
            raise ValueError("component index required for a cloud")
        idx, a = _component(source, component)
        xy = source.xy[idx]
        mass = source.gamma[idx]
    else:
        xy = source.xy
        mass = source.mass
        if mass.size and mass.min() < 0.0 < mass.max():
            raise MixedSignError("measure carries both signs")
        a = float(mass.sum())
        if a == 0.0:
            raise ZeroIntensityError("measure has zero total mass")
    d2 = (xy[:, 0] - target[0]) ** 2 + (xy[:, 1] - target[1]) ** 2
    return float(np.sqrt(np.sum(mass * d2) / a))


def outer_mass(cloud: ParticleCloud, i: int, rho: float,
               center=None) -> float:
    """Normalized circulation of component i at distance >= rho from its
    center of vorticity.

    Summation runs over every particle of the component (zeros for the
    inner ones) with pre-normalized weights, the same enumeration
    smoothed_outer_mass uses; monotone rounding then preserves the
    sandwich inequalities between the two exactly, bit for bit.
    """
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    idx, a = _component(cloud, i)
    c = center_of_vorticity(cloud, i) if center is None else np.asarray(center)
    d2 = (cloud.xy[idx, 0] - c[0]) ** 2 + (cloud.xy[idx, 1] - c[1]) ** 2
    w = cloud.gamma[idx] / a
    return float(np.sum(np.where(d2 >= rho * rho, w, 0.0)))


@dataclass(frozen=True)
class CutoffSpec:
    """Radially symmetric C^2 plateau: 1 inside radius rho, 0 beyond
    rho + band, quintic smoothstep in between.

    With s = (r - rho)/band, psi = 1 - (6 s^5 - 15 s^4 + 10 s^3); the
    derivative bounds are |psi'| <= 15/(8 band) and
    |psi''| <= (10/sqrt(3)) / band^2.
    """

    rho: float
    band: float
    center: np.ndarray = None

    def __post_init__(self):
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        if self.band <= 0.0:
            raise ValueError("band must be positive")
        c = (np.zeros(2) if self.center is None
             else np.asarray(self.center, dtype=np.float64))
        object.__setattr__(self, "center", c)


def cutoff_eval(spec: CutoffSpec, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    r = float(np.hypot(x[0] - spec.center[0], x[1] - spec.center[1]))
    return _cutoff_radial(spec, np.array([r]))[0]


def _cutoff_radial(spec: CutoffSpec, r: np.ndarray) -> np.ndarray:
    s = np.clip((r - spec.rho) / spec.band, 0.0, 1.0)
    return 1.0 - (6.0 * s - 15.0) * s * s * s * s - 10.0 * s * s * s


def smoothed_outer_mass(cloud: ParticleCloud, i: int,
                        spec: CutoffSpec) -> float:
    """Cutoff-smoothed outer mass (1/a_i) sum (1 - psi(x_k - center)) gamma_k;
    the caller centers the cutoff on the component's vorticity center.
    Sandwiched termwise between outer_mass(rho + band) and outer_mass(rho),
    exactly (same weight normalization and summation order as outer_mass)."""
    idx, a = _component(cloud, i)
    r = np.hypot(cloud.xy[idx, 0] - spec.center[0],
                 cloud.xy[idx, 1] - spec.center[1])
    psi = _cutoff_radial(spec, r)
    w = cloud.gamma[idx] / a
    return float(np.sum(w * (1.0 - psi)))


def rearrangement_profile(zeta: np.ndarray, pitch: float, s: float) -> float:
    """Radius of the symmetric-decreasing rearrangement's superlevel set:
    sqrt(|{zeta > s}| / pi) with the area measured in grid cells."""
    if s < 0.0:
        raise ValueError("level must be nonnegative")
    area = float(np.count_nonzero(zeta > s)) * pitch * pitch
    return float(np.sqrt(area / np.pi))


def tail_velocity_bound_check(zeta: np.ndarray, pitch: float,
                              origin, x, p: float):
    """Tail kernel integral I2 = sum zeta h^2 / |x - y| (cells closer than
    h/2 excluded) against the interpolation bound
    ||zeta||_p^(p/(2(p-1))) * mass^((p-2)/(2(p-1))); returns (I2, bound) so a
    sweep can track the ratio."""
    if p <= 2.0:
        raise ValueError("p must exceed 2")
    if (zeta < 0.0).any():
        raise ValueError("zeta must be nonnegative")
    origin = np.asarray(origin, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    ii, jj = np.nonzero(zeta)
    if ii.size == 0:
        return 0.0, 0.0
    vals = zeta[ii, jj]
    cx = origin[0] + (ii + 0.5) * pitch
    cy = origin[1] + (jj + 0.5) * pitch
    dist = np.hypot(cx - x[0], cy - x[1])
    keep = dist >= 0.5 * pitch
    h2 = pitch * pitch
    i2 = float(np.sum(vals[keep] * h2 / dist[keep]))
    lp = float(np.sum(vals ** p * h2) ** (1.0 / p))
    mass = float(np.sum(vals) * h2)
    expo = p / (2.0 * (p - 1.0))
    bound = lp ** expo * mass ** ((p - 2.0) / (2.0 * (p - 1.0)))
    return i2, bound


def grid_density(cloud: ParticleCloud, component: int | None = None,
                 signed: bool = False):
    """Bin particles to the sampling grid and return (density, origin):
    density = accumulated circulation / pitch^2 per cell.  By default the
    absolute density of one component (rearrangement inputs must be
    nonnegative)."""
    if cloud.pitch is None or cloud.pitch <= 0.0:
        raise ValueError("cloud pitch unknown; no grid to reconstruct on")
    if component is None:
        idx = np.arange(cloud.n_particles)
    else:
        idx, _ = _component(cloud, component)
    xy = cloud.xy[idx]
    gamma = cloud.gamma[idx]
    h = cloud.pitch
    ij = np.floor(xy / h).astype(np.int64)
    imin = ij.min(axis=0)
    shape = ij.max(axis=0) - imin + 1
    dens = np.zeros(tuple(shape))
    np.add.at(dens, (ij[:, 0] - imin[0], ij[:, 1] - imin[1]), gamma / (h * h))
    if not signed:
        dens = np.abs(dens)
    origin = imin.astype(np.float64) * h
    return dens, origin


def cloud_as_measure(cloud: ParticleCloud,
                     component: int | None = None) -> AtomicMeasure:
    if component is None:
        return AtomicMeasure(cloud.xy.copy(), cloud.gamma.copy())
    idx = cloud.component_indices(component)
    return AtomicMeasure(cloud.xy[idx], cloud.gamma[idx])
