# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Final-state dump: an uncompressed .npz holding

    version        int      format version (1)
    degree         int      DG degree p
    values         float64  (K, 5, N_p) conserved nodal values
    eps            float64  (K,) artificial viscosity of the last RHS
    gamma          float64  ratio of specific heats
    mesh_checksum  str      SHA-256 of the CFD mesh the state lives on
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..core.exceptions import ConfigError, FormatError
from ..core.utils import U
from ..euler.state import N_CONSERVED, GasModel
from ..mesh.mesh import Mesh
from ..refelem.basis import n_basis

STATE_VERSION = 1


@dataclass(frozen=True, eq=False)
class SolutionState:
    degree: int
    values: np.ndarray
    eps: np.ndarray
    gamma: float
    mesh_checksum: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        npn = n_basis(self.degree)
        if values.ndim != 3 or values.shape[1:] != (N_CONSERVED, npn):
            raise FormatError(
                msg=f"state values have shape {values.shape}, expected (K, {N_CONSERVED}, {npn}) for p={self.degree}",
            )
        if eps.shape != (values.shape[0],):
            raise FormatError(msg=f"viscosity has shape {eps.shape}, expected ({values.shape[0]},)")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "eps", eps)

    @property
    def n_elements(self) -> int:
        return int(self.values.shape[0])

    @property
    def gas(self) -> GasModel:
        return GasModel(gamma=self.gamma)

    def check_mesh(self, mesh: Mesh) -> None:
        if mesh.n_elements != self.n_elements:
            raise FormatError(
                msg=f"state holds {self.n_elements} elements, mesh has {mesh.n_elements}",
            )
        if mesh.checksum() != self.mesh_checksum:
            raise FormatError(
                msg="state was computed on a different mesh (checksum mismatch)",
                context={"state": self.mesh_checksum[:16], "mesh": mesh.checksum()[:16]},
            )


def write_state(state: SolutionState, path: Union[str, Path]) -> Path:
    out = Path(path)
    with U.atomic_open(out) as fh:
        np.savez(
            fh,
            version=np.array(STATE_VERSION),
            degree=np.array(state.degree),
            values=state.values,
            eps=state.eps,
            gamma=np.array(state.gamma),
            mesh_checksum=np.array(state.mesh_checksum),
        )
    return out


def read_state(path: Union[str, Path], mesh: Optional[Mesh] = None) -> SolutionState:
    p = Path(path)
    if not p.exists():
        raise ConfigError(msg=f"state file not found: {p}", context={"path": str(p)})
    try:
        with np.load(p, allow_pickle=False) as z:
            version = int(z["version"])
            if version != STATE_VERSION:
                raise FormatError(msg=f"unsupported state file version {version}", context={"path": str(p)})
            state = SolutionState(
                degree=int(z["degree"]),
                values=z["values"],
                eps=z["eps"],
                gamma=float(z["gamma"]),
                mesh_checksum=str(z["mesh_checksum"]),
            )
    except (KeyError, ValueError, OSError) as e:
        raise FormatError(msg=f"cannot read state file {p}", cause=e, context={"path": str(p)}) from e
    if mesh is not None:
        state.check_mesh(mesh)
    return state
