# SPDX-License-Identifier: LGPL-3.0-or-later
from .state_file import STATE_VERSION, SolutionState, read_state, write_state
from .vtk_writer import VTK_TETRA, sub_tets, write_vtk, write_vtk_stream

__all__ = [
    "STATE_VERSION",
    "SolutionState",
    "VTK_TETRA",
    "read_state",
    "sub_tets",
    "write_state",
    "write_vtk",
    "write_vtk_stream",
]
