"""Tower-of-bubbles construction and verification for the planar
Lane-Emden problem at large exponent.

The package builds the k-bubble approximate solution layer by layer:
parameter system (:mod:`bubbletower.params`), radial correction
profiles (:mod:`bubbletower.profiles`), closed-form integral checks
(:mod:`bubbletower.integrals`), the assembled tower with its weighted
residual (:mod:`bubbletower.tower`), and the finite-dimensional matrix
plus barrier inequalities (:mod:`bubbletower.linearized`).  The
``bubbletower`` console script fronts all of it.
"""

from .numerics import DomainError, ToleranceError, find_root, RootBracket
from .params import (ParamSet, solve_unperturbed, alpha_via_lambert,
                     solve_full_system, check_structural_properties)
from .profiles import (RadialProfile, correction_profiles,
                       correction_constants, taylor_check, z0, v_alpha,
                       V_alpha, phi0, phi1)
from .integrals import (IntegralReport, closed_form_I, z_identities,
                        I_alpha_quadrature, flux_corrected_I,
                        verify_elementary_table, squared_potential_moment)
from .tower import (TowerApprox, AnnulusPartition, ResidualScan,
                    build_tower, build_partition, eval_tower, residual_at,
                    weighted_norm, residual_scan, nodal_count,
                    potential_bound_check)
from .linearized import (TowerMatrix, BarrierConfig, build_matrix,
                         det_and_recursion_check, recursion_check,
                         default_barrier_config, barrier_under_check,
                         barrier_over_check, psi_profiles_check,
                         mass_decomp_check, supersolution_check)

__version__ = "1.0.0"

__all__ = [
    "DomainError", "ToleranceError", "find_root", "RootBracket",
    "ParamSet", "solve_unperturbed", "alpha_via_lambert",
    "solve_full_system", "check_structural_properties",
    "RadialProfile", "correction_profiles", "correction_constants",
    "taylor_check", "z0", "v_alpha", "V_alpha", "phi0", "phi1",
    "IntegralReport", "closed_form_I", "z_identities",
    "I_alpha_quadrature", "flux_corrected_I", "verify_elementary_table",
    "squared_potential_moment",
    "TowerApprox", "AnnulusPartition", "ResidualScan", "build_tower",
    "build_partition", "eval_tower", "residual_at", "weighted_norm",
    "residual_scan", "nodal_count", "potential_bound_check",
    "TowerMatrix", "BarrierConfig", "build_matrix",
    "det_and_recursion_check", "recursion_check",
    "default_barrier_config", "barrier_under_check",
    "barrier_over_check", "psi_profiles_check", "mass_decomp_check",
    "supersolution_check",
]
