# SPDX-License-Identifier: LGPL-3.0-or-later
from .element_operators import ElementOperators, build_mesh_operators, build_operators, discrete_divergence_check, divergence_residuals
from .geometry import ElementGeometry, compute_mapping, jacobian_determinants

__all__ = [
    "ElementGeometry",
    "ElementOperators",
    "build_mesh_operators",
    "build_operators",
    "compute_mapping",
    "discrete_divergence_check",
    "divergence_residuals",
    "jacobian_determinants",
]
