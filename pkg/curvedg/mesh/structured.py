# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from itertools import permutations
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import ConfigError
from .connectivity import build_connectivity, face_vertex_table
from .mesh import FaceKey, Mesh, face_key

_LOG = logging.getLogger("curvedg.mesh.structured")

SIDE_TAGS = (("xmin", "xmax"), ("ymin", "ymax"), ("zmin", "zmax"))
DEFAULT_FACE_TAG = "wall"

CellFilter = Callable[[np.ndarray], bool]
FaceTagger = Callable[[np.ndarray], Optional[str]]
VertexMap = Callable[[np.ndarray], np.ndarray]


def _as_triple(n: Union[int, Sequence[int]]) -> Tuple[int, int, int]:
    if isinstance(n, (int, np.integer)):
        t = (int(n),) * 3
    else:
        t = tuple(int(v) for v in n)
    if len(t) != 3 or min(t) < 1:
        raise ConfigError(msg=f"structured box needs three positive cell counts, got {n!r}")
    return t  # type: ignore[return-value]


def structured_box(
    n: Union[int, Sequence[int]],
    lo: Sequence[float] = (0.0, 0.0, 0.0),
    hi: Sequence[float] = (1.0, 1.0, 1.0),
    *,
    keep_cell: Optional[CellFilter] = None,
    tagger: Optional[FaceTagger] = None,
    transform: Optional[VertexMap] = None,
    logger: Optional[logging.Logger] = None,
) -> Mesh:
    """
    Kuhn (Freudenthal) split of an nx x ny x nz box into 6 tets per cell.

    keep_cell(center) drops cells; tagger(face_points) may tag any boundary face
    (box sides default to xmin..zmax, other boundary faces to "wall");
    transform(points) maps the vertices after tagging.
    """
    nx, ny, nz = _as_triple(n)
    lo_a = np.asarray(lo, dtype=float)
    hi_a = np.asarray(hi, dtype=float)
    if lo_a.shape != (3,) or hi_a.shape != (3,) or np.any(hi_a <= lo_a):
        raise ConfigError(msg="structured box needs lo < hi in every axis", context={"lo": list(lo), "hi": list(hi)})
    counts = np.array([nx, ny, nz])

    grid = np.stack(
        np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), np.arange(nz + 1), indexing="ij"), axis=-1
    ).transpose(2, 1, 0, 3).reshape(-1, 3)
    points = lo_a + (hi_a - lo_a) * grid / counts

    stride = np.array([1, nx + 1, (nx + 1) * (ny + 1)], dtype=np.int64)
    cells = np.stack(
        np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij"), axis=-1
    ).transpose(2, 1, 0, 3).reshape(-1, 3)
    if keep_cell is not None:
        centers = lo_a + (hi_a - lo_a) * (cells + 0.5) / counts
        mask = np.array([bool(keep_cell(c)) for c in centers], dtype=bool)
        cells = cells[mask]
    if cells.shape[0] == 0:
        raise ConfigError(msg="structured box filter removed every cell")

    base = cells @ stride
    far = base + stride.sum()
    tets = []
    for a, b, _ in permutations(range(3)):
        tets.append(np.stack([base, base + stride[a], base + stride[a] + stride[b], far], axis=1))
    tets_a = np.concatenate(tets, axis=0)

    conn = build_connectivity(tets_a)
    fv = face_vertex_table(tets_a)
    face_tags: Dict[FaceKey, str] = {}
    for e, f in conn.boundary_slots().tolist():
        ids = fv[e, f]
        g = grid[ids]
        tag: Optional[str] = tagger(points[ids]) if tagger is not None else None
        if tag is None:
            tag = DEFAULT_FACE_TAG
            for axis in range(3):
                if np.all(g[:, axis] == 0):
                    tag = SIDE_TAGS[axis][0]
                elif np.all(g[:, axis] == counts[axis]):
                    tag = SIDE_TAGS[axis][1]
        face_tags[face_key(ids)] = tag

    if transform is not None:
        points = np.asarray(transform(points), dtype=float)
    mesh = Mesh.from_arrays(points, tets_a, face_tags, logger=logger or _LOG)
    (logger or _LOG).debug("Structured box %dx%dx%d: %d tets", nx, ny, nz, mesh.n_elements)
    return mesh


def cells_for_elements(target_elements: int) -> int:
    """Smallest n with 6 n^3 >= target_elements."""
    n = 1
    while 6 * n**3 < target_elements:
        n += 1
    return n


def sphere_shell(
    n: int,
    radius: float = 1.0,
    outer: float = 3.0,
    *,
    octant: bool = False,
    surface_tag: str = "sphere",
    far_tag: str = "farfield",
    symmetry_tags: Sequence[str] = ("symx", "symy", "symz"),
    logger: Optional[logging.Logger] = None,
) -> Mesh:
    """
    Region between a sphere of `radius` and the cube of half-width `outer`,
    built from the structured box minus the inner cube whose surface is
    pushed radially onto the sphere. With `octant` only the positive octant
    is meshed and the coordinate planes carry `symmetry_tags`.
    """
    if not 0.0 < radius < outer:
        raise ConfigError(msg="sphere shell needs 0 < radius < outer", context={"radius": radius, "outer": outer})
    lo = 0.0 if octant else -outer
    span = outer - lo
    for edge in (radius,) if octant else (-radius, radius):
        k = (edge - lo) / span * n
        if abs(k - round(k)) > 1e-9:
            (logger or _LOG).warning("Sphere shell: %d cells per axis do not put a grid plane on the inner cube", n)
            break

    def tagger(pts: np.ndarray) -> str:
        if octant:
            for axis, tag in enumerate(symmetry_tags):
                if np.all(pts[:, axis] == 0.0):
                    return tag
        if np.allclose(np.abs(pts).max(axis=1), radius):
            return surface_tag
        return far_tag

    def radial(y: np.ndarray) -> np.ndarray:
        s = np.abs(y).max(axis=1, keepdims=True)
        tau = (s - radius) / (outer - radius)
        unit = radius * y / np.linalg.norm(y, axis=1, keepdims=True)
        return (1.0 - tau) * unit + tau * y

    return structured_box(
        n,
        (lo,) * 3,
        (outer,) * 3,
        keep_cell=lambda c: bool(np.abs(c).max() > radius),
        tagger=tagger,
        transform=radial,
        logger=logger,
    )
