# SPDX-License-Identifier: LGPL-3.0-or-later
from .connectivity import Connectivity, FaceLink, build_connectivity
from .gmsh_io import parse_gmsh, read_gmsh, save_gmsh, write_gmsh
from .mesh import BoundaryFace, Mesh
from .structured import sphere_shell, structured_box
from .submesh import SubMesh, extract_submesh

__all__ = [
    "BoundaryFace",
    "Connectivity",
    "FaceLink",
    "Mesh",
    "SubMesh",
    "build_connectivity",
    "extract_submesh",
    "parse_gmsh",
    "read_gmsh",
    "save_gmsh",
    "sphere_shell",
    "structured_box",
    "write_gmsh",
]
