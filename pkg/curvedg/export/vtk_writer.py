# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Legacy ASCII VTK export of a DG solution.

Every element is split into p^3 linear tets over its collocation nodes (the
canonical subdivision of the degree-p lattice: corner tets, octahedra cut
along one diagonal, inverted tets). Points are not shared between elements,
so the discontinuous field is shown as is.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, TextIO, Tuple, Union

import numpy as np

from ..core.exceptions import FormatError
from ..core.utils import U
from ..euler.state import RHO, GasModel, pressure_unchecked, velocity
from ..refelem.basis import n_basis
from ..refelem.nodes import equi_lattice, equidistant_nodes, lattice_lookup

_LOG = logging.getLogger("curvedg.export.vtk")

VTK_TETRA = 10
FLOAT_FMT = "%.17g"


def _oriented(tet: List[int], ref_pts: np.ndarray) -> Tuple[int, int, int, int]:
    x = ref_pts[tet]
    vol = np.dot(np.cross(x[1] - x[0], x[2] - x[0]), x[3] - x[0])
    if vol < 0.0:
        tet = [tet[0], tet[2], tet[1], tet[3]]
    return tuple(tet)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def sub_tets(p: int) -> np.ndarray:
    """(p^3, 4) positively oriented sub-tets as indices into the collocation nodes."""
    idx = lattice_lookup(p)
    ref_pts = equidistant_nodes(p)
    out: List[Tuple[int, int, int, int]] = []
    for i, j, k in equi_lattice(p):
        s = i + j + k
        if s > p - 1:
            continue
        o = idx[(i, j, k)]
        a, b, c = idx[(i + 1, j, k)], idx[(i, j + 1, k)], idx[(i, j, k + 1)]
        out.append(_oriented([o, a, b, c], ref_pts))
        if s <= p - 2:
            d, e, f = idx[(i + 1, j + 1, k)], idx[(i + 1, j, k + 1)], idx[(i, j + 1, k + 1)]
            # octahedron a b c d e f split along the a-f diagonal
            for u, v in ((b, d), (d, e), (e, c), (c, b)):
                out.append(_oriented([a, f, u, v], ref_pts))
            if s <= p - 3:
                g = idx[(i + 1, j + 1, k + 1)]
                out.append(_oriented([d, e, f, g], ref_pts))
    table = np.array(out, dtype=np.int64)
    table.setflags(write=False)
    return table


def _scalars(fh: TextIO, name: str, data: np.ndarray) -> None:
    fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
    np.savetxt(fh, data.reshape(-1, 1), fmt=FLOAT_FMT)


def write_vtk_stream(
    fh: TextIO,
    nodes: np.ndarray,
    values: np.ndarray,
    eps: np.ndarray,
    degree: int,
    gas: GasModel,
    *,
    title: str = "curvedg solution",
) -> Tuple[int, int]:
    """Writes the dataset; returns (points, cells)."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    npn = n_basis(degree)
    K = values.shape[0]
    if values.shape != (K, 5, npn) or nodes.shape != (K, npn, 3):
        raise FormatError(
            msg=f"node/value shapes {nodes.shape}, {values.shape} do not match N_p={npn} for p={degree}",
        )
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (K,))

    local = sub_tets(degree)
    cells = (local[None, :, :] + (np.arange(K) * npn)[:, None, None]).reshape(-1, 4)
    n_pts = K * npn
    n_cells = cells.shape[0]

    U_pts = values.transpose(0, 2, 1).reshape(-1, 5)
    rho = U_pts[:, RHO]
    p = pressure_unchecked(U_pts, gas)
    with np.errstate(divide="ignore", invalid="ignore"):
        vel = velocity(U_pts)
        mach = np.linalg.norm(vel, axis=1) / np.sqrt(gas.gamma * p / rho)

    fh.write(f"# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    fh.write(f"POINTS {n_pts} double\n")
    np.savetxt(fh, nodes.reshape(-1, 3), fmt=FLOAT_FMT)
    fh.write(f"CELLS {n_cells} {5 * n_cells}\n")
    np.savetxt(fh, np.column_stack([np.full(n_cells, 4), cells]), fmt="%d")
    fh.write(f"CELL_TYPES {n_cells}\n")
    np.savetxt(fh, np.full((n_cells, 1), VTK_TETRA), fmt="%d")
    fh.write(f"CELL_DATA {n_cells}\n")
    fh.write("SCALARS element int 1\nLOOKUP_TABLE default\n")
    np.savetxt(fh, np.repeat(np.arange(K), local.shape[0]).reshape(-1, 1), fmt="%d")
    fh.write(f"POINT_DATA {n_pts}\n")
    _scalars(fh, "density", rho)
    fh.write("VECTORS velocity double\n")
    np.savetxt(fh, vel, fmt=FLOAT_FMT)
    _scalars(fh, "pressure", p)
    _scalars(fh, "mach", mach)
    _scalars(fh, "viscosity", np.repeat(eps, npn))
    return n_pts, n_cells


def write_vtk(
    path: Union[str, Path],
    nodes: np.ndarray,
    values: np.ndarray,
    eps: np.ndarray,
    degree: int,
    gas: GasModel,
    *,
    title: str = "curvedg solution",
    logger: Optional[logging.Logger] = None,
) -> Path:
    out = Path(path)
    with U.atomic_open(out, "w") as fh:
        n_pts, n_cells = write_vtk_stream(fh, nodes, values, eps, degree, gas, title=title)
    (logger or _LOG).info("Wrote %s (%d points, %d cells)", out, n_pts, n_cells)
    return out
