# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

YAML_EXAMPLE = r"""# curvedg case file (YAML or JSON)
#
# Run:
# ./curvedg.py --config case.yaml <command>
#
# Merge multiple configs (later overrides earlier):
# ./curvedg.py --config case.yaml --config overrides.yaml <command>
#
# Two-phase parse:
# Phase 0: reads only --config / logging flags
# Phase 1: loads+merges the case files and applies top-level keys as argparse defaults
# Phase 2: parses the full command line (CLI flags win over the files)
#
# --------------------------------------------------------------------------------------
# Top-level CLI keys
# --------------------------------------------------------------------------------------
# command: solve # curve | solve | export | bench (when not given on the CLI)
# threads: 8
# deterministic: false # fixed chunking + ordered reductions, bitwise reproducible
#
# --------------------------------------------------------------------------------------
# Case sections
# --------------------------------------------------------------------------------------
# mesh:
#   path: meshes/wing.msh # Gmsh 2.2 ASCII, tets + tagged boundary triangles
#   # or a built-in mesh:
#   builtin: {kind: sphere_shell, n: 9, radius: 1.0, outer: 3.0, octant: true}
# curved_mesh: ./out/curved.cdg # sidecar from `curve`; omit for a straight mesh
#
# gas: {gamma: 1.4}
# freestream: {mach: 0.38, alpha: 0.0, density: 1.0, pressure: 1.0} # alpha pitches in x-z
# boundary: # tag -> slip_wall | farfield | symmetry
#   sphere: slip_wall
#   farfield: farfield
# riemann: hllc # hllc | llf
# viscosity: {eps0: 0.3, kappa: 4.0, s0_offset: 0.0, component: 0, weighted_indicator: false}
#
# run:
#   p_schedule: [2, 3, 4]
#   tolerances: [1.0e-4, 1.0e-5] # intermediate levels; the last level uses final_tolerance
#   final_tolerance: 1.0e-9
#   check_interval: 1000
#   max_iterations: [20000, 20000, 200000]
#   cfl: 0.3
#   dt: [null, null, 2.0e-5] # optional fixed step per level
#   residual_norm: inf # inf | l2
#   padded: true
#
# curving:
#   box_lo: [-0.1, -0.1, -0.1]
#   box_hi: [1.6, 1.6, 1.6]
#   surface_tag: sphere
#   symmetry_tags: [symx, symy, symz]
#   fem_degree: 2
#   target: {kind: sphere, center: [0, 0, 0], radius: 1.0} # or {kind: nurbs, path: wing.nurbs}
#   youngs_modulus: 1.0
#   poisson_ratio: 0.3
#
# output:
#   directory: ./out
#   state: state.npz
#   log: convergence.csv
#   vtk: solution.vtk
#   sidecar: curved.cdg
#
# bench: {degree: 4, elements: 5000, repetitions: 5, threads: [1, 8]}
"""

FEATURE_SUMMARY = """ • Curving: sub-mesh box selection, linear elasticity (P1/P2), NURBS or analytic sphere targets\n
 • Mesh: Gmsh 2.2 reader/writer, built-in octant/full sphere shell, face connectivity\n
 • Discretisation: nodal DG on tetrahedra, orthonormal modal basis, Grundmann-Moller cubature\n
 • Fluxes: HLLC and local Lax-Friedrichs, slip wall / farfield / symmetry boundaries\n
 • Shock capturing: smoothness-indicator artificial viscosity (BR1 gradients)\n
 • Time stepping: low-storage RK(5,4), CFL or fixed dt, p-refinement schedule\n
 • Outputs: curved-mesh sidecar, state files, CSV convergence log, legacy VTK\n
 • Performance: padded block layout, chunked multi-threaded kernels, layout micro-benchmark\n"""
