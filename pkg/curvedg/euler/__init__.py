# SPDX-License-Identifier: LGPL-3.0-or-later
from .boundary import BoundaryKind, boundary_state, parse_boundary_map
from .riemann import FallbackCounter, hllc_flux, llf_flux, riemann_solver
from .state import (
    N_CONSERVED,
    ConservedState,
    GasModel,
    check_admissible,
    flux,
    freestream_state,
    mach_number,
    max_wavespeed,
    normal_flux,
    pressure,
    primitive_to_conserved,
    sound_speed,
    velocity,
)
from .viscosity import (
    ViscosityModel,
    aux_flux,
    central_trace,
    element_viscosity,
    grad_flux,
    smoothness_indicator,
    viscosity_amount,
    viscosity_from_log,
)

__all__ = [
    "N_CONSERVED",
    "BoundaryKind",
    "ConservedState",
    "FallbackCounter",
    "GasModel",
    "ViscosityModel",
    "aux_flux",
    "boundary_state",
    "central_trace",
    "check_admissible",
    "element_viscosity",
    "flux",
    "freestream_state",
    "grad_flux",
    "hllc_flux",
    "llf_flux",
    "mach_number",
    "max_wavespeed",
    "normal_flux",
    "parse_boundary_map",
    "pressure",
    "primitive_to_conserved",
    "riemann_solver",
    "smoothness_indicator",
    "sound_speed",
    "velocity",
    "viscosity_amount",
    "viscosity_from_log",
]
