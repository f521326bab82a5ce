# SPDX-License-Identifier: LGPL-3.0-or-later
from .curved_mesh import CurvedMesh, check_curved_jacobians, curve_mesh
from .deformation import DeformationField, query_displacement
from .elasticity import ElasticMaterial, solve_elasticity, strain_energy
from .nurbs import NurbsSurface, cylinder_patch, eval_surface, eval_surface_derivs, flat_patch, read_nurbs, sphere_patch
from .projection import boundary_displacement, closest_point, sphere_displacement
from .sidecar import read_sidecar, write_sidecar

__all__ = [
    "CurvedMesh",
    "DeformationField",
    "ElasticMaterial",
    "NurbsSurface",
    "boundary_displacement",
    "check_curved_jacobians",
    "closest_point",
    "curve_mesh",
    "cylinder_patch",
    "eval_surface",
    "eval_surface_derivs",
    "flat_patch",
    "query_displacement",
    "read_nurbs",
    "read_sidecar",
    "solve_elasticity",
    "sphere_displacement",
    "sphere_patch",
    "strain_energy",
    "write_sidecar",
]
