# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigError
from .connectivity import face_vertex_table
from .mesh import Mesh

_LOG = logging.getLogger("curvedg.mesh.submesh")

D1 = "D1"
D2 = "D2"
NEUMANN = "N"


@dataclass(frozen=True, eq=False)
class SubMesh:
    """
    Elements selected for curving. Face sets are (n, 2) arrays of
    (local element, local face); local element i is parent element elements[i].
    local_tets index into vertex_ids, which holds parent vertex ids.
    """

    parent: Mesh
    elements: np.ndarray
    vertex_ids: np.ndarray
    local_tets: np.ndarray
    faces_d1: np.ndarray
    faces_d2: np.ndarray
    faces_n: np.ndarray
    symmetry_tags: Tuple[str, ...]
    box_lo: np.ndarray
    box_hi: np.ndarray

    @property
    def n_elements(self) -> int:
        return int(self.elements.size)

    @property
    def vertices(self) -> np.ndarray:
        return self.parent.vertices[self.vertex_ids]

    def element_map(self) -> np.ndarray:
        """Parent element -> local index, -1 if not selected."""
        out = np.full(self.parent.n_elements, -1, dtype=np.int64)
        out[self.elements] = np.arange(self.elements.size)
        return out

    def face_points(self, faces: np.ndarray) -> np.ndarray:
        """(n, 3, 3) physical vertex coordinates of the given local faces."""
        if faces.size == 0:
            return np.zeros((0, 3, 3))
        fv = face_vertex_table(self.parent.tets[self.elements[faces[:, 0]]])
        return self.parent.vertices[fv[np.arange(len(faces)), faces[:, 1]]]

    def classes(self) -> Dict[str, np.ndarray]:
        return {D1: self.faces_d1, D2: self.faces_d2, NEUMANN: self.faces_n}


def _inside(points: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.all((points > lo) & (points < hi), axis=-1)


def extract_submesh(
    mesh: Mesh,
    box_lo: Sequence[float],
    box_hi: Sequence[float],
    surface_tag: str,
    symmetry_tags: Iterable[str] = (),
    *,
    logger: Optional[logging.Logger] = None,
) -> SubMesh:
    """
    Select every tet with at least one vertex strictly inside the box and
    classify its boundary: faces tagged `surface_tag` are D1, faces tagged with
    a symmetry tag are N, cut faces and all remaining boundary faces are D2.
    """
    log = logger or _LOG
    lo = np.asarray(box_lo, dtype=float)
    hi = np.asarray(box_hi, dtype=float)
    sym = tuple(symmetry_tags)
    if lo.shape != (3,) or hi.shape != (3,) or np.any(hi <= lo):
        raise ConfigError(msg="curving box needs lo < hi in every axis", context={"lo": lo.tolist(), "hi": hi.tolist()})
    if surface_tag not in mesh.tags:
        raise ConfigError(msg=f"surface tag '{surface_tag}' is not a boundary tag of the mesh", context={"tags": list(mesh.tags)})
    missing = [t for t in sym if t not in mesh.tags]
    if missing:
        log.warning("Symmetry tags not present in the mesh: %s", missing)
    if surface_tag in sym:
        raise ConfigError(msg=f"tag '{surface_tag}' cannot be both surface and symmetry")

    vin = _inside(mesh.vertices, lo, hi)
    selected = np.nonzero(vin[mesh.tets].any(axis=1))[0]
    if selected.size == 0:
        raise ConfigError(msg="curving box selects no elements", context={"lo": lo.tolist(), "hi": hi.tolist()})

    in_sub = np.zeros(mesh.n_elements, dtype=bool)
    in_sub[selected] = True
    nb = mesh.connectivity.neighbor[selected]
    tags = mesh.boundary_tag_array[selected]

    d1, d2, nn = [], [], []
    for i in range(selected.size):
        for f in range(4):
            other = nb[i, f]
            if other >= 0:
                if not in_sub[other]:
                    d2.append((i, f))
                continue
            tag = tags[i, f]
            if tag == surface_tag:
                d1.append((i, f))
            elif tag in sym:
                nn.append((i, f))
            else:
                d2.append((i, f))
    if not d1:
        raise ConfigError(msg=f"curving box contains no faces tagged '{surface_tag}'")

    vertex_ids, local = np.unique(mesh.tets[selected], return_inverse=True)
    local_tets = local.reshape(-1, 4)

    def pack(rows):
        arr = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    for arr in (selected, vertex_ids, local_tets):
        arr.setflags(write=False)
    sub = SubMesh(
        parent=mesh,
        elements=selected,
        vertex_ids=vertex_ids,
        local_tets=local_tets,
        faces_d1=pack(d1),
        faces_d2=pack(d2),
        faces_n=pack(nn),
        symmetry_tags=sym,
        box_lo=lo,
        box_hi=hi,
    )
    log.info(
        "Curving sub-mesh: %d of %d elements, faces D1=%d D2=%d N=%d",
        sub.n_elements, mesh.n_elements, len(d1), len(d2), len(nn),
    )
    return sub
