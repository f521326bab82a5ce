# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.exceptions import ConfigError, Fatal
from .basis import barycentric, grad_vandermonde, n_basis, vandermonde
from .nodes import build_colloc_nodes
from .quadrature import REF_VERTICES, build_cubature, build_face_quadrature

_LOG = logging.getLogger("curvedg.refelem")

# Outward-oriented vertex triples of the reference faces:
# f0: t = -1, f1: s = -1, f2: r + s + t = -1, f3: r = -1
FACE_VERTEX_IDS: Tuple[Tuple[int, int, int], ...] = ((0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2))
FACE_PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = tuple(permutations(range(3)))


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.setflags(write=False)


@dataclass(frozen=True, eq=False)
class ReferenceElement:
    """
    Degree-dependent tables on the reference tetrahedron. Immutable; shared by
    every element kernel.

    Shapes: colloc (Np,3), cub (Nc,3), face_nodes (4,Ng,3), grad_vandermonde
    (3,Nc,Np), face_vandermonde (4Ng,Np), deriv_* (3, n_points, Np).
    """

    degree: int
    n_basis: int
    colloc_nodes: np.ndarray
    cub_nodes: np.ndarray
    cub_weights: np.ndarray
    face_nodes: np.ndarray
    face_weights: np.ndarray
    face_bary: np.ndarray
    vandermonde: np.ndarray
    inv_vandermonde: np.ndarray
    grad_vandermonde: np.ndarray
    cub_vandermonde: np.ndarray
    face_vandermonde: np.ndarray
    interp_cub: np.ndarray
    interp_face: np.ndarray
    deriv_cub: np.ndarray
    deriv_face: np.ndarray
    deriv_nodes: np.ndarray
    colloc_face_ids: Tuple[np.ndarray, ...]
    face_node_maps: Dict[Tuple[int, int, int], np.ndarray] = field(repr=False)
    cub_strength: int = 0
    condition_number: float = float("nan")

    @property
    def n_cub(self) -> int:
        return int(self.cub_nodes.shape[0])

    @property
    def n_face(self) -> int:
        """Quadrature nodes per face (N_g)."""
        return int(self.face_weights.shape[0])

    @property
    def face_jacobian_ref(self) -> np.ndarray:
        """|dr/du x dr/dv| for each reference face (1, 1, sqrt(3), 1)."""
        out = np.empty(4)
        for f, (a, b, c) in enumerate(FACE_VERTEX_IDS):
            tu = (REF_VERTICES[b] - REF_VERTICES[a]) / 2.0
            tv = (REF_VERTICES[c] - REF_VERTICES[a]) / 2.0
            out[f] = np.linalg.norm(np.cross(tu, tv))
        return out

    def face_area(self, face: int) -> float:
        return float(self.face_weights.sum() * self.face_jacobian_ref[face])

    def interpolation_matrix(self, points: np.ndarray) -> np.ndarray:
        """Rows evaluate the nodal interpolant at `points`."""
        return vandermonde(self.degree, points) @ self.inv_vandermonde


def _face_node_maps(bary: np.ndarray) -> Dict[Tuple[int, int, int], np.ndarray]:
    """
    For each permutation sigma of the face vertices, node k on our side pairs
    with node maps[sigma][k] on a neighbour whose vertex j is our vertex sigma(j).
    """
    maps: Dict[Tuple[int, int, int], np.ndarray] = {}
    for sigma in FACE_PERMUTATIONS:
        target = bary[:, list(sigma)]
        dist = np.linalg.norm(bary[None, :, :] - target[:, None, :], axis=2)
        idx = np.argmin(dist, axis=1)
        if np.max(dist[np.arange(len(idx)), idx]) > 1e-10:
            raise Fatal(1, f"face quadrature is not invariant under vertex permutation {sigma}")
        idx.setflags(write=False)
        maps[sigma] = idx
    return maps


@lru_cache(maxsize=None)
def reference_element(p: int, cub_strength: Optional[int] = None) -> ReferenceElement:
    if p < 1:
        raise ConfigError(msg=f"reference element requires p >= 1, got {p}")
    nodes = build_colloc_nodes(p)
    cub_nodes, cub_w = build_cubature(p, cub_strength)
    face_nodes, face_w, face_bary = build_face_quadrature(p, FACE_VERTEX_IDS)

    V = vandermonde(p, nodes)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > 1e12:
        raise Fatal(1, f"Vandermonde matrix for degree {p} is singular (cond={cond:.3e})")
    _LOG.debug("Reference element p=%d: Np=%d Ncub=%d Ng=%d cond(V)=%.3e", p, V.shape[0], cub_w.size, face_w.size, cond)
    Vinv = np.linalg.inv(V)

    Vr_cub = grad_vandermonde(p, cub_nodes)
    V_cub = vandermonde(p, cub_nodes)
    flat_face = face_nodes.reshape(-1, 3)
    V_face = vandermonde(p, flat_face)
    Vr_face = grad_vandermonde(p, flat_face)
    Vr_nodes = grad_vandermonde(p, nodes)

    lam = barycentric(nodes)
    colloc_face_ids = []
    for ids in FACE_VERTEX_IDS:
        opposite = ({0, 1, 2, 3} - set(ids)).pop()
        on_face = np.nonzero(np.abs(lam[:, opposite]) < 1e-10)[0]
        on_face.setflags(write=False)
        colloc_face_ids.append(on_face)

    interp_cub = V_cub @ Vinv
    interp_face = V_face @ Vinv
    deriv_cub = Vr_cub @ Vinv
    deriv_face = Vr_face @ Vinv
    deriv_nodes = Vr_nodes @ Vinv
    _freeze(
        cub_nodes, cub_w, face_nodes, face_w, face_bary, V, Vinv, Vr_cub, V_cub, V_face,
        interp_cub, interp_face, deriv_cub, deriv_face, deriv_nodes,
    )

    return ReferenceElement(
        degree=p,
        n_basis=n_basis(p),
        colloc_nodes=nodes,
        cub_nodes=cub_nodes,
        cub_weights=cub_w,
        face_nodes=face_nodes,
        face_weights=face_w,
        face_bary=face_bary,
        vandermonde=V,
        inv_vandermonde=Vinv,
        grad_vandermonde=Vr_cub,
        cub_vandermonde=V_cub,
        face_vandermonde=V_face,
        interp_cub=interp_cub,
        interp_face=interp_face,
        deriv_cub=deriv_cub,
        deriv_face=deriv_face,
        deriv_nodes=deriv_nodes,
        colloc_face_ids=tuple(colloc_face_ids),
        face_node_maps=_face_node_maps(face_bary),
        cub_strength=2 * p + 1 if cub_strength is None else int(cub_strength),
        condition_number=cond,
    )
