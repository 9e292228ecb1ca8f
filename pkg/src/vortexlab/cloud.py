"""Particle-cloud state: the discrete vorticity field.

A cloud is a set of particles with positions, fixed circulations, and a
component tag.  Circulations are never mutated by time stepping, which
encodes conservative transport (component intensities and Lebesgue-norm
surrogates are constant in time by construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MixedSignError


@dataclass(frozen=True)
class ParticleCloud:
    xy: np.ndarray          # (n, 2) positions
    gamma: np.ndarray       # (n,) circulations (vorticity x cell area)
    tag: np.ndarray         # (n,) component index in [0, n_components)
    pitch: float | None     # sampling pitch h; None once unknown
    blob_radius: float      # regularization length delta_b
    time: float = 0.0
    _intensities: np.ndarray = field(init=False, repr=False, compare=False,
                                     default=None)

    def __post_init__(self):
        xy = np.ascontiguousarray(np.asarray(self.xy, dtype=np.float64))
        gamma = np.ascontiguousarray(np.asarray(self.gamma, dtype=np.float64))
        tag = np.ascontiguousarray(np.asarray(self.tag, dtype=np.int64))
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError("xy must have shape (n, 2)")
        n = xy.shape[0]
        if gamma.shape != (n,) or tag.shape != (n,):
            raise ValueError("gamma and tag must match xy length")
        if n and not (np.isfinite(xy).all() and np.isfinite(gamma).all()):
            raise ValueError("cloud contains non-finite values")
        if n and tag.min() < 0:
            raise ValueError("component tags must be nonnegative")
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "tag", tag)
        if self.blob_radius < 0.0:
            raise ValueError("blob_radius must be nonnegative")

        n_comp = int(tag.max()) + 1 if n else 0
        intensities = np.zeros(n_comp)
        for i in range(n_comp):
            g = gamma[tag == i]
            if g.size and g.min() < 0.0 < g.max():
                raise MixedSignError(f"component {i} carries both signs")
            intensities[i] = g.sum()
        object.__setattr__(self, "_intensities", intensities)

    @property
    def n_particles(self) -> int:
        return self.xy.shape[0]

    @property
    def n_components(self) -> int:
        return self._intensities.shape[0]

    @property
    def intensities(self) -> np.ndarray:
        return self._intensities

    def component_indices(self, i) -> np.ndarray:
        return np.flatnonzero(self.tag == i)

    def intensity(self, i) -> float:
        return float(self._intensities[i])

    def with_positions(self, xy, time=None) -> "ParticleCloud":
        """Same circulations and tags at new positions (one time step)."""
        return ParticleCloud(xy, self.gamma, self.tag, self.pitch,
                             self.blob_radius,
                             self.time if time is None else time)
