from .boundary import splitting_boundary_stencil, surface_div_bracket, upwind_boundary_stencil
from .hmm import HmmLocalOperator, hmm_local_operator
from .inner import InnerFluxes, inner_flux_stencil

__all__ = [
    "InnerFluxes",
    "inner_flux_stencil",
    "HmmLocalOperator",
    "hmm_local_operator",
    "surface_div_bracket",
    "upwind_boundary_stencil",
    "splitting_boundary_stencil",
]
