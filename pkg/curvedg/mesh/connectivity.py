# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.exceptions import MeshError
from ..refelem.reference_element import FACE_PERMUTATIONS, FACE_VERTEX_IDS

_FACE_IDS = np.asarray(FACE_VERTEX_IDS, dtype=np.int64)

# sigma encoded base 3 -> index into FACE_PERMUTATIONS
_PERM_LOOKUP = np.full(27, -1, dtype=np.int64)
for _i, _s in enumerate(FACE_PERMUTATIONS):
    _PERM_LOOKUP[_s[0] * 9 + _s[1] * 3 + _s[2]] = _i


@dataclass(frozen=True)
class FaceLink:
    """Interior face seen from `element`: neighbour face vertex j is our face vertex perm[j]."""

    element: int
    face: int
    neighbor: int
    neighbor_face: int
    perm: Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class Connectivity:
    """
    Per-element face adjacency. Arrays are (K, 4); boundary slots hold -1.
    perm_index indexes FACE_PERMUTATIONS and describes the neighbour side as
    seen from this element.
    """

    neighbor: np.ndarray
    neighbor_face: np.ndarray
    perm_index: np.ndarray
    links: Tuple[FaceLink, ...]

    def boundary_slots(self) -> np.ndarray:
        """(n, 2) array of (element, local face) with no neighbour."""
        e, f = np.nonzero(self.neighbor < 0)
        return np.stack([e, f], axis=1)

    def link_of(self, element: int, face: int) -> FaceLink:
        nb = int(self.neighbor[element, face])
        if nb < 0:
            raise MeshError(msg=f"face {face} of element {element} is a boundary face")
        return FaceLink(
            element=element,
            face=face,
            neighbor=nb,
            neighbor_face=int(self.neighbor_face[element, face]),
            perm=FACE_PERMUTATIONS[int(self.perm_index[element, face])],
        )


def face_vertex_table(tets: np.ndarray) -> np.ndarray:
    """Global vertex ids of every local face in outward order, shape (K, 4, 3)."""
    return np.asarray(tets, dtype=np.int64)[:, _FACE_IDS]


def _permutation_index(ours: np.ndarray, theirs: np.ndarray) -> np.ndarray:
    # sigma[:, j] = position of theirs[:, j] inside ours
    sigma = np.argmax(ours[:, :, None] == theirs[:, None, :], axis=1)
    return _PERM_LOOKUP[sigma[:, 0] * 9 + sigma[:, 1] * 3 + sigma[:, 2]]


def build_connectivity(tets: np.ndarray) -> Connectivity:
    tets = np.asarray(tets, dtype=np.int64)
    K = tets.shape[0]
    fv = face_vertex_table(tets).reshape(-1, 3)
    keys = np.sort(fv, axis=1)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)

    if counts.size and counts.max() > 2:
        bad = int(np.argmax(counts > 2))
        slots = np.nonzero(inverse == bad)[0]
        raise MeshError(
            msg=f"nonconforming mesh: a face is shared by {int(counts[bad])} elements",
            context={"elements": sorted({int(s) // 4 for s in slots}), "vertices": keys[slots[0]].tolist()},
        )

    neighbor = np.full(K * 4, -1, dtype=np.int64)
    neighbor_face = np.full(K * 4, -1, dtype=np.int64)
    perm_index = np.full(K * 4, -1, dtype=np.int64)

    order = np.argsort(inverse, kind="stable")
    grouped = inverse[order]
    first = np.ones(order.size, dtype=bool)
    first[1:] = grouped[1:] != grouped[:-1]
    starts = np.nonzero(first)[0]
    paired = starts[counts[grouped[starts]] == 2]
    a = order[paired]
    b = order[paired + 1]

    neighbor[a] = b // 4
    neighbor[b] = a // 4
    neighbor_face[a] = b % 4
    neighbor_face[b] = a % 4
    perm_index[a] = _permutation_index(fv[a], fv[b])
    perm_index[b] = _permutation_index(fv[b], fv[a])
    if np.any(perm_index[a] < 0) or np.any(perm_index[b] < 0):
        raise MeshError(msg="matched faces do not share a vertex triple")

    lo, hi = np.minimum(a, b), np.maximum(a, b)
    links = tuple(
        FaceLink(
            element=int(s // 4),
            face=int(s % 4),
            neighbor=int(t // 4),
            neighbor_face=int(t % 4),
            perm=FACE_PERMUTATIONS[int(perm_index[s])],
        )
        for s, t in sorted(zip(lo.tolist(), hi.tolist()))
    )

    shape = (K, 4)
    out = [neighbor.reshape(shape), neighbor_face.reshape(shape), perm_index.reshape(shape)]
    for arr in out:
        arr.setflags(write=False)
    return Connectivity(neighbor=out[0], neighbor_face=out[1], perm_index=out[2], links=links)
