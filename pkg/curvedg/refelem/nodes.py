# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Warp & blend interpolation nodes on the reference tetrahedron.

Equidistant lattice points are shifted face by face with a 1D warp that moves
equispaced points onto Gauss-Lobatto points, blended into the interior. The
optimised blend parameter per degree comes from a published table.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from scipy.special import roots_jacobi

from ..core.exceptions import ConfigError

_LOG = logging.getLogger("curvedg.refelem")

MIN_DEGREE = 1
MAX_DEGREE = 9

# blend parameter alpha, indexed by degree - 1
_ALPHA_OPT = (
    0.0, 0.0, 0.0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577, 1.1603,
    1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655,
)
_TOL = 1e-10

# equilateral tetrahedron used for the warp construction
_V1 = np.array([-1.0, -1.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_V2 = np.array([1.0, -1.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_V3 = np.array([0.0, 2.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_V4 = np.array([0.0, 0.0, 3.0 / np.sqrt(6.0)])


def gauss_lobatto(p: int) -> np.ndarray:
    """Legendre-Gauss-Lobatto points on [-1, 1], ascending."""
    if p == 1:
        return np.array([-1.0, 1.0])
    inner = np.sort(roots_jacobi(p - 1, 1.0, 1.0)[0])
    return np.concatenate([[-1.0], inner, [1.0]])


@lru_cache(maxsize=None)
def equi_lattice(p: int) -> Tuple[Tuple[int, int, int], ...]:
    """Lattice index (i, j, k) of every node; t-index outermost, r-index innermost."""
    out = []
    for k in range(p + 1):
        for j in range(p + 1 - k):
            for i in range(p + 1 - k - j):
                out.append((i, j, k))
    return tuple(out)


def equidistant_nodes(p: int) -> np.ndarray:
    ijk = np.array(equi_lattice(p), dtype=float)
    return -1.0 + 2.0 * ijk / p


def _eval_warp(p: int, x_gl: np.ndarray, xout: np.ndarray) -> np.ndarray:
    """1D warp from equispaced to Gauss-Lobatto points, evaluated at xout."""
    xeq = np.array([-1.0 + 2.0 * (p - i) / p for i in range(p + 1)])
    warp = np.zeros_like(xout)
    for i in range(p + 1):
        d = np.full_like(xout, x_gl[i] - xeq[i])
        for j in range(1, p):
            if i != j:
                d = d * (xout - xeq[j]) / (xeq[i] - xeq[j])
        if i != 0:
            d = -d / (xeq[i] - xeq[0])
        if i != p:
            d = d / (xeq[i] - xeq[p])
        warp = warp + d
    return warp


def _eval_shift(p: int, alpha: float, l1: np.ndarray, l2: np.ndarray, l3: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x_gl = -gauss_lobatto(p)
    blend1 = l2 * l3
    blend2 = l1 * l3
    blend3 = l1 * l2
    warp1 = blend1 * 4.0 * _eval_warp(p, x_gl, l3 - l2) * (1.0 + (alpha * l1) ** 2)
    warp2 = blend2 * 4.0 * _eval_warp(p, x_gl, l1 - l3) * (1.0 + (alpha * l2) ** 2)
    warp3 = blend3 * 4.0 * _eval_warp(p, x_gl, l2 - l1) * (1.0 + (alpha * l3) ** 2)
    dx = warp1 + np.cos(2.0 * np.pi / 3.0) * warp2 + np.cos(4.0 * np.pi / 3.0) * warp3
    dy = np.sin(2.0 * np.pi / 3.0) * warp2 + np.sin(4.0 * np.pi / 3.0) * warp3
    return dx, dy


def _xyz_to_rst(xyz: np.ndarray) -> np.ndarray:
    rhs = xyz - 0.5 * (_V2 + _V3 + _V4 - _V1)
    a = np.column_stack([0.5 * (_V2 - _V1), 0.5 * (_V3 - _V1), 0.5 * (_V4 - _V1)])
    return np.linalg.solve(a, rhs.T).T


def warp_blend_nodes(p: int) -> np.ndarray:
    if p == 0:
        return np.array([[-0.5, -0.5, -0.5]])
    if p - 1 < len(_ALPHA_OPT):
        alpha = _ALPHA_OPT[p - 1]
    else:
        _LOG.warning("No tabulated warp parameter for degree %d; using blend-only nodes", p)
        alpha = 0.0

    rst = equidistant_nodes(p)
    r, s, t = rst[:, 0], rst[:, 1], rst[:, 2]
    L1 = (1.0 + t) / 2.0
    L2 = (1.0 + s) / 2.0
    L3 = -(1.0 + r + s + t) / 2.0
    L4 = (1.0 + r) / 2.0

    t1 = np.array([_V2 - _V1, _V2 - _V1, _V3 - _V2, _V3 - _V1])
    t2 = np.array([_V3 - 0.5 * (_V1 + _V2), _V4 - 0.5 * (_V1 + _V2), _V4 - 0.5 * (_V2 + _V3), _V4 - 0.5 * (_V1 + _V3)])
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 /= np.linalg.norm(t2, axis=1)[:, None]

    xyz = np.outer(L3, _V1) + np.outer(L4, _V2) + np.outer(L2, _V3) + np.outer(L1, _V4)
    shift = np.zeros_like(xyz)
    faces = ((L1, L2, L3, L4), (L2, L1, L3, L4), (L3, L1, L4, L2), (L4, L1, L3, L2))
    for face, (la, lb, lc, ld) in enumerate(faces):
        warp1, warp2 = _eval_shift(p, alpha, lb, lc, ld)
        blend = lb * lc * ld
        denom = (lb + 0.5 * la) * (lc + 0.5 * la) * (ld + 0.5 * la)
        ids = denom > _TOL
        blend[ids] = (1.0 + (alpha * la[ids]) ** 2) * blend[ids] / denom[ids]
        shift += np.outer(blend * warp1, t1[face]) + np.outer(blend * warp2, t2[face])
        # nodes on this face but not interior to the others take the face warp alone
        on_face = (la < _TOL) & (((lb > _TOL).astype(int) + (lc > _TOL) + (ld > _TOL)) < 3)
        shift[on_face] = np.outer(warp1[on_face], t1[face]) + np.outer(warp2[on_face], t2[face])

    return _xyz_to_rst(xyz + shift)


@lru_cache(maxsize=None)
def _cached_nodes(p: int) -> np.ndarray:
    nodes = warp_blend_nodes(p)
    nodes.setflags(write=False)
    return nodes


def build_colloc_nodes(p: int) -> np.ndarray:
    """Collocation nodes for degree p in 1..9 (the p=1 set is the four vertices)."""
    if not (MIN_DEGREE <= int(p) <= MAX_DEGREE):
        raise ConfigError(msg=f"unsupported polynomial degree {p}; supported range is {MIN_DEGREE}..{MAX_DEGREE}")
    return _cached_nodes(int(p))


def lattice_lookup(p: int) -> Dict[Tuple[int, int, int], int]:
    return {ijk: n for n, ijk in enumerate(equi_lattice(p))}
