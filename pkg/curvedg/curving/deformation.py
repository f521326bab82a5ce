# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from ..core.exceptions import ConfigError, FormatError
from ..core.utils import U
from ..refelem import reference_element

_LOG = logging.getLogger("curvedg.curving.deformation")

FIELD_VERSION = 1
INSIDE_TOL = 1e-10
_CANDIDATES = 8


def affine_jacobians(vertices: np.ndarray, tets: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Straight-element maps x = v0 + dxdr (r + 1): returns v0 (K,3) and
    dxdr (K,3,3) with dxdr[k, m, j] = dx_m/dr_j.
    """
    x = np.asarray(vertices, dtype=float)[np.asarray(tets, dtype=np.int64)]
    v0 = x[:, 0]
    dxdr = 0.5 * np.stack([x[:, 1] - v0, x[:, 2] - v0, x[:, 3] - v0], axis=2)
    return v0, dxdr


def affine_image(vertices: np.ndarray, tets: np.ndarray, ref_points: np.ndarray) -> np.ndarray:
    """(K, n, 3) physical images of reference points under each straight map."""
    v0, dxdr = affine_jacobians(vertices, tets)
    return v0[:, None, :] + np.einsum("kmj,nj->knm", dxdr, np.asarray(ref_points) + 1.0)


@dataclass(frozen=True, eq=False)
class DeformationField:
    """
    Continuous Lagrange displacement of degree p_fem on the straight sub-mesh.
    Element e's node n is global node elem_nodes[e, n]; node coordinates and
    displacements are per global node.
    """

    degree: int
    vertices: np.ndarray
    tets: np.ndarray
    node_xyz: np.ndarray
    elem_nodes: np.ndarray
    displacement: np.ndarray
    parent_elements: Optional[np.ndarray] = None
    stiffness: Any = field(default=None, repr=False)
    fixed_dofs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_elements(self) -> int:
        return int(self.tets.shape[0])

    @cached_property
    def _maps(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        v0, dxdr = affine_jacobians(self.vertices, self.tets)
        return v0, dxdr, np.linalg.inv(dxdr)

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.vertices[self.tets].mean(axis=1))

    @cached_property
    def _ref(self):
        return reference_element(self.degree)

    def to_reference(self, element: int, points: np.ndarray) -> np.ndarray:
        """
        Reference coordinates of physical points in `element`. Newton on the
        affine map converges in a single step, taken here in closed form.
        """
        v0, _, inv = self._maps
        return np.einsum("jm,nm->nj", inv[element], np.asarray(points, dtype=float) - v0[element]) - 1.0

    def evaluate_in_element(self, element: int, ref_points: np.ndarray) -> np.ndarray:
        rows = self._ref.interpolation_matrix(np.asarray(ref_points, dtype=float).reshape(-1, 3))
        return rows @ self.displacement[self.elem_nodes[element]]

    def _barycentric(self, elements: np.ndarray, points: np.ndarray) -> np.ndarray:
        v0, _, inv = self._maps
        lam = 0.5 * (np.einsum("...jm,...m->...j", inv[elements], points - v0[elements]))
        return np.concatenate([1.0 - lam.sum(axis=-1, keepdims=True), lam], axis=-1)

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Containing element per point (-1 if none) and clipped barycentric coordinates."""
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        n = pts.shape[0]
        elem = np.full(n, -1, dtype=np.int64)
        bary = np.zeros((n, 4))
        if n == 0:
            return elem, bary
        k = min(_CANDIDATES, self.n_elements)
        _, cand = self._tree.query(pts, k=k)
        cand = np.asarray(cand).reshape(n, k)
        lam = self._barycentric(cand, pts[:, None, :])
        ok = lam.min(axis=-1) >= -INSIDE_TOL
        hit = ok.any(axis=1)
        first = np.argmax(ok, axis=1)
        elem[hit] = cand[hit, first[hit]]
        bary[hit] = lam[hit, first[hit]]

        lo = self.vertices.min(axis=0) - INSIDE_TOL
        hi = self.vertices.max(axis=0) + INSIDE_TOL
        all_elems = np.arange(self.n_elements)
        for i in np.nonzero(~hit)[0]:
            if np.any(pts[i] < lo) or np.any(pts[i] > hi):
                continue
            lam_i = self._barycentric(all_elems, pts[i][None, :])
            worst = lam_i.min(axis=1)
            j = int(np.argmax(worst))
            if worst[j] >= -INSIDE_TOL:
                elem[i] = j
                bary[i] = lam_i[j]
        bary = np.clip(bary, 0.0, None)
        s = bary.sum(axis=1, keepdims=True)
        bary = np.divide(bary, s, out=np.zeros_like(bary), where=s > 0)
        return elem, bary

    def query(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Displacement at arbitrary points. Points outside the sub-mesh get zero
        displacement and found=False.
        """
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        elem, bary = self.locate(pts)
        found = elem >= 0
        disp = np.zeros_like(pts)
        if np.any(found):
            ref_pts = 2.0 * bary[found, 1:] - 1.0
            rows = self._ref.interpolation_matrix(ref_pts)
            nodal = self.displacement[self.elem_nodes[elem[found]]]
            disp[found] = np.einsum("in,inc->ic", rows, nodal)
        return disp, found

    def save(self, path: Union[str, Path]) -> Path:
        out = Path(path)
        extra = {} if self.parent_elements is None else {"parent_elements": self.parent_elements}
        with U.atomic_open(out) as fh:
            np.savez(
                fh,
                version=np.array(FIELD_VERSION),
                degree=np.array(self.degree),
                vertices=self.vertices,
                tets=self.tets,
                node_xyz=self.node_xyz,
                elem_nodes=self.elem_nodes,
                displacement=self.displacement,
                **extra,
            )
        return out

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DeformationField":
        p = Path(path)
        if not p.exists():
            raise ConfigError(msg=f"deformation field not found: {p}")
        try:
            with np.load(p, allow_pickle=False) as z:
                if int(z["version"]) != FIELD_VERSION:
                    raise FormatError(msg=f"unsupported deformation field version {int(z['version'])}")
                return cls(
                    degree=int(z["degree"]),
                    vertices=z["vertices"],
                    tets=z["tets"],
                    node_xyz=z["node_xyz"],
                    elem_nodes=z["elem_nodes"],
                    displacement=z["displacement"],
                    parent_elements=z["parent_elements"] if "parent_elements" in z.files else None,
                )
        except (KeyError, ValueError, OSError) as e:
            raise FormatError(msg=f"cannot read deformation field {p}", cause=e) from e


def query_displacement(field: DeformationField, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Displacement and found flag at points x (3,) or (n, 3); zero where not found."""
    disp, found = field.query(x)
    if np.ndim(x) == 1:
        return disp[0], found[0]
    return disp, found
