# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import numpy as np

from ..core.utils import U
from .connectivity import face_vertex_table


def signed_volumes(vertices: np.ndarray, tets: np.ndarray) -> np.ndarray:
    x = np.asarray(vertices, dtype=float)[np.asarray(tets, dtype=np.int64)]
    e1, e2, e3 = x[:, 1] - x[:, 0], x[:, 2] - x[:, 0], x[:, 3] - x[:, 0]
    return np.einsum("ij,ij->i", np.cross(e1, e2), e3) / 6.0


def face_areas(vertices: np.ndarray, tets: np.ndarray) -> np.ndarray:
    """(K, 4) triangle areas in local face order."""
    x = np.asarray(vertices, dtype=float)[face_vertex_table(tets)]
    return 0.5 * np.linalg.norm(np.cross(x[..., 1, :] - x[..., 0, :], x[..., 2, :] - x[..., 0, :]), axis=-1)


def inscribed_diameter(vertices: np.ndarray, tets: np.ndarray) -> np.ndarray:
    """h = 6V / sum of face areas, the insphere diameter of each tet."""
    return 6.0 * np.abs(signed_volumes(vertices, tets)) / face_areas(vertices, tets).sum(axis=1)


def mesh_checksum(vertices: np.ndarray, tets: np.ndarray) -> str:
    v = np.ascontiguousarray(vertices, dtype="<f8")
    t = np.ascontiguousarray(tets, dtype="<i8")
    return U.sha256_hex(v, t)
