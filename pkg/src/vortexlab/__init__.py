"""vortexlab: a numerical laboratory for 2D vortex dynamics.

Simulates concentrated vorticity with a blob-regularized vortex particle
method, integrates the corresponding point-vortex system side by side, and
measures Wasserstein-type concentration and tracking diagnostics across
concentration-scale sweeps.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .cloud import ParticleCloud
from .initial_data import InitialDataSpec, sample_initial_cloud
from .kernels import (KernelParams, QuadTree, biot_savart, blob_kernel,
                      direct_velocity, newtonian_potential, split_velocity,
                      tree_velocity)
from .measures import AtomicMeasure, TransportPlan, w1_exact, w1_signed
from .metrics import (CutoffSpec, center_of_vorticity, center_velocity,
                      cutoff_eval, outer_mass, rearrangement_profile,
                      smoothed_outer_mass, tail_velocity_bound_check,
                      w2_to_dirac)
from .pointvortex import (PointVortexState, PVTrajectory, pv_hamiltonian,
                          pv_impulses, pv_integrate, pv_min_separation,
                          pv_rhs, pv_step)
from .vpm import (component_support_distance, lp_norm_estimate, vpm_integrate,
                  vpm_rhs, vpm_step)

__all__ = [
    "__version__", "backend_name",
    "ParticleCloud", "InitialDataSpec", "sample_initial_cloud",
    "KernelParams", "QuadTree", "biot_savart", "blob_kernel",
    "direct_velocity", "newtonian_potential", "split_velocity",
    "tree_velocity",
    "AtomicMeasure", "TransportPlan", "w1_exact", "w1_signed",
    "CutoffSpec", "center_of_vorticity", "center_velocity", "cutoff_eval",
    "outer_mass", "rearrangement_profile", "smoothed_outer_mass",
    "tail_velocity_bound_check", "w2_to_dirac",
    "PointVortexState", "PVTrajectory", "pv_hamiltonian", "pv_impulses",
    "pv_integrate", "pv_min_separation", "pv_rhs", "pv_step",
    "component_support_distance", "lp_norm_estimate", "vpm_integrate",
    "vpm_rhs", "vpm_step",
]
