# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Mapping, Optional

import numpy as np

from ..core.exceptions import ConfigError, CurvingError
from ..mesh.mesh import Mesh
from ..operators.geometry import jacobian_determinants
from ..refelem import reference_element
from .deformation import DeformationField, affine_image

_LOG = logging.getLogger("curvedg.curving.curved_mesh")


@dataclass(frozen=True, eq=False)
class CurvedMesh:
    """
    Straight mesh plus degree-p collocation coordinates for curved elements.
    Elements missing from `curved` use the affine image of the reference nodes.
    """

    mesh: Mesh
    degree: int
    curved: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        frozen: Dict[int, np.ndarray] = {}
        for k, nodes in self.curved.items():
            arr = np.array(nodes, dtype=float)
            arr.setflags(write=False)
            frozen[int(k)] = arr
        object.__setattr__(self, "curved", MappingProxyType(dict(sorted(frozen.items()))))

    @classmethod
    def straight(cls, mesh: Mesh, degree: int) -> "CurvedMesh":
        return cls(mesh=mesh, degree=degree)

    @property
    def n_curved(self) -> int:
        return len(self.curved)

    def is_curved(self, k: int) -> bool:
        return int(k) in self.curved

    def straight_nodes(self) -> np.ndarray:
        ref = reference_element(self.degree)
        return affine_image(self.mesh.vertices, self.mesh.tets, ref.colloc_nodes)

    def element_nodes(self, k: int) -> np.ndarray:
        if int(k) in self.curved:
            return self.curved[int(k)]
        ref = reference_element(self.degree)
        return affine_image(self.mesh.vertices, self.mesh.tets[[k]], ref.colloc_nodes)[0]

    def all_nodes(self) -> np.ndarray:
        """(K, Np, 3) physical collocation coordinates of every element."""
        out = self.straight_nodes()
        for k, nodes in self.curved.items():
            out[k] = nodes
        return out

    def nodes_at_degree(self, q: int) -> "CurvedMesh":
        """Interpolate the stored isoparametric maps to degree-q collocation nodes."""
        if q == self.degree:
            return self
        src = reference_element(self.degree)
        dst = reference_element(q)
        M = src.interpolation_matrix(dst.colloc_nodes)
        return CurvedMesh(mesh=self.mesh, degree=q, curved={k: M @ v for k, v in self.curved.items()})


def curve_mesh(
    mesh: Mesh,
    deformation: DeformationField,
    degree: int,
    *,
    check: bool = True,
    logger: Optional[logging.Logger] = None,
) -> CurvedMesh:
    """
    Displace the degree-p collocation nodes of every sub-mesh element by the
    solved field; elements outside the sub-mesh stay straight.
    """
    log = logger or _LOG
    if deformation.parent_elements is None:
        raise ConfigError(msg="deformation field does not record its parent elements")
    if degree < 1:
        raise ConfigError(msg=f"DG degree must be >= 1, got {degree}")
    ref = reference_element(degree)
    parents = np.asarray(deformation.parent_elements)
    if parents.size and parents.max() >= mesh.n_elements:
        raise ConfigError(msg="deformation field does not belong to this mesh")
    straight = affine_image(mesh.vertices, mesh.tets[parents], ref.colloc_nodes)
    curved: Dict[int, np.ndarray] = {}
    for local, k in enumerate(parents.tolist()):
        curved[k] = straight[local] + deformation.evaluate_in_element(local, ref.colloc_nodes)
    result = CurvedMesh(mesh=mesh, degree=degree, curved=curved)
    if check:
        check_curved_jacobians(result, logger=log)
    return result


def check_curved_jacobians(curved: CurvedMesh, *, logger: Optional[logging.Logger] = None) -> Dict[int, float]:
    """Minimum det(dx/dr) over the cubature nodes of each curved element."""
    log = logger or _LOG
    if not curved.curved:
        return {}
    ref = reference_element(curved.degree)
    ids = np.fromiter(curved.curved.keys(), dtype=np.int64)
    nodes = np.stack([curved.curved[k] for k in ids.tolist()])
    jmin = jacobian_determinants(nodes, ref).min(axis=1)
    bad = ids[jmin <= 0.0]
    if bad.size:
        raise CurvingError(
            msg=f"{bad.size} curved elements have a non-positive Jacobian",
            context={"elements": bad[:50].tolist(), "min_jacobian": float(jmin.min())},
        )
    report = dict(zip(ids.tolist(), jmin.tolist()))
    worst = int(ids[np.argmin(jmin)])
    log.info("Curved %d elements; minimum Jacobian %.4e (element %d)", ids.size, float(jmin.min()), worst)
    return report
