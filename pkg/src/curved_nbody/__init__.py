"""Relative equilibria of the n-body problem continued into constant curvature.

Planar central configurations are continued, as critical points of the
steady rotating-frame Lagrangian, to the sphere (``kappa > 0``) and the
hyperbolic plane (``kappa < 0``) in a single stereographic chart.
"""

__version__ = "0.1.0"

from .continuation import (
    AugmentedState,
    ContinuationFamily,
    FamilyRecord,
    PhaseAnchor,
    augmented_jacobian,
    augmented_map,
    continue_family,
    family_diagnostics,
    newton_solve,
)
from .dynamics import PhaseState, eom_rhs, integrate, verify_re
from .embedding import embed, latitude_report, rescale_unit
from .gradient import grad_fd_oracle, grad_lagrangian, grad_pair_potential, hessian_fd, spectrum
from .model import (
    conformal_factor,
    kinetic_steady,
    lagrangian_steady,
    pair_potential,
    potential_energy,
)
from .seeds import (
    SeedReport,
    check_nondegeneracy,
    lagrange_seed,
    lagrange_triangle,
    polygon_cc,
    polygon_seed,
    refine_cc,
)

__all__ = [
    "AugmentedState",
    "ContinuationFamily",
    "FamilyRecord",
    "PhaseAnchor",
    "PhaseState",
    "SeedReport",
    "augmented_jacobian",
    "augmented_map",
    "check_nondegeneracy",
    "conformal_factor",
    "continue_family",
    "embed",
    "eom_rhs",
    "family_diagnostics",
    "grad_fd_oracle",
    "grad_lagrangian",
    "grad_pair_potential",
    "hessian_fd",
    "integrate",
    "kinetic_steady",
    "lagrange_seed",
    "lagrange_triangle",
    "lagrangian_steady",
    "latitude_report",
    "newton_solve",
    "pair_potential",
    "polygon_cc",
    "polygon_seed",
    "potential_energy",
    "refine_cc",
    "rescale_unit",
    "spectrum",
    "verify_re",
]
