# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from ..core.exceptions import MeshError
from .connectivity import Connectivity, FaceLink, build_connectivity, face_vertex_table
from .measures import face_areas, inscribed_diameter, mesh_checksum, signed_volumes

_LOG = logging.getLogger("curvedg.mesh")

DEFAULT_BOUNDARY_TAG = "boundary"
FaceKey = Tuple[int, int, int]


def face_key(ids: Iterable[int]) -> FaceKey:
    a, b, c = sorted(int(i) for i in ids)
    return (a, b, c)


@dataclass(frozen=True)
class BoundaryFace:
    element: int
    face: int
    tag: str


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Straight-sided conforming tetrahedral mesh. Tets are positively oriented;
    arrays are read-only so a Mesh can be shared between threads.
    """

    vertices: np.ndarray
    tets: np.ndarray
    boundary_faces: Tuple[BoundaryFace, ...]
    connectivity: Connectivity = field(repr=False)

    @property
    def n_elements(self) -> int:
        return int(self.tets.shape[0])

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def face_links(self) -> Tuple[FaceLink, ...]:
        return self.connectivity.links

    @cached_property
    def tags(self) -> Tuple[str, ...]:
        return tuple(sorted({bf.tag for bf in self.boundary_faces}))

    @cached_property
    def boundary_tag_array(self) -> np.ndarray:
        """(K, 4) object array: tag of each boundary slot, None for interior faces."""
        out = np.full((self.n_elements, 4), None, dtype=object)
        for bf in self.boundary_faces:
            out[bf.element, bf.face] = bf.tag
        return out

    def faces_with_tag(self, tag: str) -> List[BoundaryFace]:
        return [bf for bf in self.boundary_faces if bf.tag == tag]

    def face_vertices(self) -> np.ndarray:
        """(K, 4, 3) global vertex ids per local face, outward order."""
        return face_vertex_table(self.tets)

    def volumes(self) -> np.ndarray:
        return signed_volumes(self.vertices, self.tets)

    def total_volume(self) -> float:
        return float(self.volumes().sum())

    def face_areas(self) -> np.ndarray:
        return face_areas(self.vertices, self.tets)

    def inscribed_diameters(self) -> np.ndarray:
        return inscribed_diameter(self.vertices, self.tets)

    def checksum(self) -> str:
        return mesh_checksum(self.vertices, self.tets)

    @classmethod
    def from_arrays(
        cls,
        vertices: np.ndarray,
        tets: np.ndarray,
        face_tags: Optional[Mapping[FaceKey, str]] = None,
        *,
        logger: Optional[logging.Logger] = None,
    ) -> "Mesh":
        """
        Build a validated mesh: drops unreferenced vertices, reorients negative
        tets, matches faces and resolves boundary tags from sorted vertex triples.
        """
        log = logger or _LOG
        vertices = np.asarray(vertices, dtype=float)
        tets = np.array(tets, dtype=np.int64, copy=True)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise MeshError(msg=f"vertices must have shape (n, 3), got {vertices.shape}")
        if tets.ndim != 2 or tets.shape[1] != 4:
            raise MeshError(msg=f"tets must have shape (K, 4), got {tets.shape}")
        if tets.size and (tets.min() < 0 or tets.max() >= len(vertices)):
            raise MeshError(msg="tet references a vertex that does not exist")
        if np.any(np.sort(tets, axis=1)[:, 1:] == np.sort(tets, axis=1)[:, :-1]):
            raise MeshError(msg="tet with repeated vertex")

        used = np.unique(tets)
        remap = np.full(len(vertices), -1, dtype=np.int64)
        remap[used] = np.arange(used.size)
        if used.size < len(vertices):
            log.debug("Dropping %d unreferenced vertices", len(vertices) - used.size)
        vertices = vertices[used]
        tets = remap[tets]

        vol = signed_volumes(vertices, tets)
        scale = float(np.ptp(vertices, axis=0).max()) if len(vertices) else 1.0
        degenerate = np.nonzero(np.abs(vol) <= 1e-14 * max(scale, 1e-300) ** 3)[0]
        if degenerate.size:
            raise MeshError(msg="degenerate tetrahedra", context={"elements": degenerate[:20].tolist()})
        flip = vol < 0
        if np.any(flip):
            log.debug("Reorienting %d negatively oriented tets", int(flip.sum()))
            tets[flip, 1], tets[flip, 2] = tets[flip, 2].copy(), tets[flip, 1].copy()

        conn = build_connectivity(tets)

        tag_of: Dict[FaceKey, str] = {}
        for key, tag in (face_tags or {}).items():
            mapped = tuple(int(remap[i]) if 0 <= i < len(remap) else -1 for i in key)
            if min(mapped) < 0:
                log.warning("Boundary triangle %s references no tet vertex; ignored", key)
                continue
            tag_of[face_key(mapped)] = str(tag)

        fv = face_vertex_table(tets)
        boundary: List[BoundaryFace] = []
        untagged = 0
        seen = set()
        for e, f in conn.boundary_slots().tolist():
            key = face_key(fv[e, f])
            seen.add(key)
            tag = tag_of.get(key)
            if tag is None:
                untagged += 1
                tag = DEFAULT_BOUNDARY_TAG
            boundary.append(BoundaryFace(element=int(e), face=int(f), tag=tag))
        if untagged:
            log.warning("%d boundary faces carry no tag; using '%s'", untagged, DEFAULT_BOUNDARY_TAG)
        stray = [k for k in tag_of if k not in seen]
        if stray:
            log.debug("%d tagged triangles are not on the boundary; ignored", len(stray))

        vertices.setflags(write=False)
        tets.setflags(write=False)
        return cls(vertices=vertices, tets=tets, boundary_faces=tuple(boundary), connectivity=conn)
