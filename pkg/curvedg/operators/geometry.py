# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.exceptions import NumericsError
from ..refelem.reference_element import FACE_VERTEX_IDS, ReferenceElement
from ..refelem.quadrature import REF_VERTICES

DET_TOL = 1e-14


def forward_jacobians(nodes: np.ndarray, deriv: np.ndarray) -> np.ndarray:
    """
    dx/dr of the isoparametric map at the points of `deriv` (3, n_pts, Np).
    nodes (K, Np, 3) -> (K, n_pts, 3, 3) indexed [k, q, m, j] = dx_m/dr_j.
    """
    return np.einsum("jqn,knm->kqmj", deriv, nodes)


def jacobian_determinants(nodes: np.ndarray, ref: ReferenceElement) -> np.ndarray:
    """(K, N_cub) det(dx/dr) at the cubature nodes."""
    return np.linalg.det(forward_jacobians(np.asarray(nodes, dtype=float), ref.deriv_cub))


def _face_tangents() -> np.ndarray:
    """(4, 2, 3) reference tangents dr/du, dr/dv of each face parametrisation."""
    out = np.empty((4, 2, 3))
    for f, (a, b, c) in enumerate(FACE_VERTEX_IDS):
        out[f, 0] = (REF_VERTICES[b] - REF_VERTICES[a]) / 2.0
        out[f, 1] = (REF_VERTICES[c] - REF_VERTICES[a]) / 2.0
    return out


_FACE_TANGENTS = _face_tangents()


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """
    Geometric factors for a batch of K elements.

    jac        (K, Nc)        det(dx/dr) > 0 at cubature nodes
    dpsi_det   (K, Nc)        det of the physical-to-reference map, 1/jac
    rx         (K, Nc, 3, 3)  dr_j/dx_m at [k, q, j, m]
    normals    (K, 4, Ng, 3)  outward unit normals at face quadrature nodes
    face_jac   (K, 4, Ng)     surface Jacobian of the face parametrisation
    face_rx    (K, 4, Ng, 3, 3)
    """

    phys_nodes: np.ndarray
    jac: np.ndarray
    dpsi_det: np.ndarray
    rx: np.ndarray
    normals: np.ndarray
    face_jac: np.ndarray
    face_rx: np.ndarray

    @property
    def n_elements(self) -> int:
        return int(self.phys_nodes.shape[0])

    def is_affine(self, tol: float = 1e-12) -> np.ndarray:
        j = self.jac
        return np.abs(j - j[:, :1]).max(axis=1) <= tol * np.abs(j[:, :1]).max(axis=1)


def compute_mapping(
    nodes: np.ndarray,
    ref: ReferenceElement,
    *,
    element_ids: Optional[Sequence[int]] = None,
) -> ElementGeometry:
    """
    Geometric factors of the isoparametric maps x(r) = sum_i x_i l_i(r) for a
    batch of elements with nodal coordinates `nodes` (K, Np, 3) or (Np, 3).
    """
    x = np.array(nodes, dtype=float)
    if x.ndim == 2:
        x = x[None]
    ids = np.arange(x.shape[0]) if element_ids is None else np.asarray(element_ids)
    K, Ng = x.shape[0], ref.n_face

    dxdr = forward_jacobians(x, ref.deriv_cub)
    jac = np.linalg.det(dxdr)
    dxdr_f = forward_jacobians(x, ref.deriv_face).reshape(K, 4, Ng, 3, 3)
    jac_f = np.linalg.det(dxdr_f)

    bad = np.nonzero((jac <= DET_TOL).any(axis=1) | (jac_f <= DET_TOL).any(axis=(1, 2)))[0]
    if bad.size:
        raise NumericsError(
            msg=f"inverted or degenerate element {int(ids[bad[0]])}",
            context={"elements": [int(ids[b]) for b in bad[:20]], "min_jacobian": float(min(jac.min(), jac_f.min()))},
        )

    rx = np.linalg.inv(dxdr)
    face_rx = np.linalg.inv(dxdr_f)

    # tangents of the physical face: dx/du = dx/dr . dr/du
    tu = np.einsum("kfqmj,fj->kfqm", dxdr_f, _FACE_TANGENTS[:, 0])
    tv = np.einsum("kfqmj,fj->kfqm", dxdr_f, _FACE_TANGENTS[:, 1])
    cross = np.cross(tu, tv)
    face_jac = np.linalg.norm(cross, axis=-1)
    normals = cross / face_jac[..., None]

    for arr in (x, jac, rx, normals, face_jac, face_rx):
        arr.setflags(write=False)
    dpsi = 1.0 / jac
    dpsi.setflags(write=False)
    return ElementGeometry(
        phys_nodes=x, jac=jac, dpsi_det=dpsi, rx=rx, normals=normals, face_jac=face_jac, face_rx=face_rx
    )
