# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..core.exceptions import NumericsError
from ..refelem.reference_element import ReferenceElement
from .geometry import ElementGeometry, compute_mapping
from .padding import column_major_blocks, logical_view

_LOG = logging.getLogger("curvedg.operators")

BUILD_CHUNK = 128


@dataclass(frozen=True, eq=False)
class ElementOperators:
    """
    Per-element DG matrices for K elements of one degree.

    Matrices the kernels apply are stored column-major in padded blocks (see
    operators.padding); the properties below are no-copy views with the
    logical shapes:

    stiffness   (K, 3, Np, Nc)  S_x, S_y, S_z
    mass_inv    (K, Np, Np)     M^-1 obtained from the factor
    face_mass   (K, Np, 4 Ng)   M_dOmega
    interp_cub  (Nc, Np)        shared reference interpolation to cubature
    interp_face (4 Ng, Np)      shared reference interpolation to face points

    mass and mass_chol (upper Cholesky factor) are plain (K, Np, Np) arrays.
    """

    ref: ReferenceElement
    geometry: ElementGeometry
    mass: np.ndarray
    mass_chol: np.ndarray
    stiffness_blocks: np.ndarray
    mass_inv_blocks: np.ndarray
    face_mass_blocks: np.ndarray
    interp_cub_blocks: np.ndarray
    interp_face_blocks: np.ndarray

    @property
    def n_elements(self) -> int:
        return int(self.mass.shape[0])

    @property
    def stiffness(self) -> np.ndarray:
        return logical_view(self.stiffness_blocks, self.ref.n_basis)

    @property
    def mass_inv(self) -> np.ndarray:
        return logical_view(self.mass_inv_blocks, self.ref.n_basis)

    @property
    def face_mass(self) -> np.ndarray:
        return logical_view(self.face_mass_blocks, self.ref.n_basis)

    @property
    def interp_cub(self) -> np.ndarray:
        return logical_view(self.interp_cub_blocks, self.ref.n_cub)

    @property
    def interp_face(self) -> np.ndarray:
        return logical_view(self.interp_face_blocks, 4 * self.ref.n_face)

    @property
    def leading_dimension(self) -> int:
        """Padded column length of the per-element blocks."""
        return int(self.mass_inv_blocks.shape[-1])

    def solve_mass(self, rhs: np.ndarray, elements: Optional[np.ndarray] = None) -> np.ndarray:
        """M_k^-1 rhs_k for rhs of shape (K, Np) or (K, Np, n)."""
        inv = self.mass_inv if elements is None else self.mass_inv[elements]
        if rhs.ndim == 2:
            return np.einsum("kij,kj->ki", inv, rhs)
        return np.einsum("kij,kjc->kic", inv, rhs)

    def solve_mass_factored(self, k: int, rhs: np.ndarray) -> np.ndarray:
        return cho_solve((self.mass_chol[k], False), rhs)


def _build_chunk(geo: ElementGeometry, ref: ReferenceElement, lo: int, hi: int):
    jw = geo.jac[lo:hi] * ref.cub_weights
    # S[k,m,n,q] = sum_j D_j[q,n] r_{j,x_m}[k,q] J W
    S = np.einsum("jqn,kqjm,kq->kmnq", ref.deriv_cub, geo.rx[lo:hi], jw)
    Ic = ref.interp_cub
    M = np.einsum("qi,kq,qj->kij", Ic, jw, Ic)
    M = 0.5 * (M + M.transpose(0, 2, 1))
    Ng = ref.n_face
    fw = geo.face_jac[lo:hi].reshape(hi - lo, 4 * Ng) * np.tile(ref.face_weights, 4)
    Mf = ref.interp_face.T[None, :, :] * fw[:, None, :]

    npn = ref.n_basis
    chol = np.empty_like(M)
    minv = np.empty_like(M)
    eye = np.eye(npn)
    for i in range(hi - lo):
        try:
            c, low = cho_factor(M[i], lower=False, check_finite=True)
        except (LinAlgError, ValueError) as e:
            raise NumericsError(msg=f"mass matrix of element {lo + i} is not positive definite", cause=e,
                                context={"element": lo + i}) from e
        chol[i] = np.triu(c)
        minv[i] = cho_solve((c, low), eye)
    return S, M, chol, minv, Mf


def build_operators(
    geometry: ElementGeometry,
    ref: ReferenceElement,
    *,
    threads: int = 1,
) -> ElementOperators:
    K = geometry.n_elements
    bounds = [(s, min(s + BUILD_CHUNK, K)) for s in range(0, K, BUILD_CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _build_chunk(geometry, ref, *b), bounds))
    else:
        parts = [_build_chunk(geometry, ref, lo, hi) for lo, hi in bounds]
    arrays: List[np.ndarray] = [np.concatenate([p[i] for p in parts]) for i in range(5)]
    for a in arrays:
        a.setflags(write=False)
    S, M, chol, minv, Mf = arrays
    return ElementOperators(
        ref=ref,
        geometry=geometry,
        mass=M,
        mass_chol=chol,
        stiffness_blocks=column_major_blocks(S),
        mass_inv_blocks=column_major_blocks(minv),
        face_mass_blocks=column_major_blocks(Mf),
        interp_cub_blocks=column_major_blocks(ref.interp_cub),
        interp_face_blocks=column_major_blocks(ref.interp_face),
    )


def build_mesh_operators(
    nodes: np.ndarray,
    ref: ReferenceElement,
    *,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> ElementOperators:
    """Geometry and operators for every element from (K, Np, 3) collocation coordinates."""
    log = logger or _LOG
    geo = compute_mapping(nodes, ref)
    ops = build_operators(geo, ref, threads=threads)
    log.debug(
        "Operators p=%d for %d elements: Np=%d Ncub=%d Ng=%d, min J=%.3e",
        ref.degree, ops.n_elements, ref.n_basis, ref.n_cub, ref.n_face, float(geo.jac.min()),
    )
    return ops


def divergence_residuals(ops: ElementOperators, directions: Optional[Sequence[Sequence[float]]] = None) -> np.ndarray:
    """
    Per-element discrete divergence of constant vector fields c:
    || M^-1 (sum_m S_m (c_m 1) - M_dOmega (c . n)) ||_inf, maximised over `directions`
    (default: the three unit vectors, which covers every constant by linearity).
    """
    dirs = np.eye(3) if directions is None else np.asarray(directions, dtype=float).reshape(-1, 3)
    K = ops.n_elements
    Ng = ops.ref.n_face
    normals = ops.geometry.normals.reshape(K, 4 * Ng, 3)
    vol = ops.stiffness.sum(axis=3)
    out = np.zeros(K)
    for c in dirs:
        r = np.einsum("kmn,m->kn", vol, c) - np.einsum("kng,kg->kn", ops.face_mass, normals @ c)
        out = np.maximum(out, np.abs(ops.solve_mass(r)).max(axis=1))
    return out


def discrete_divergence_check(ops: ElementOperators, directions: Optional[Sequence[Sequence[float]]] = None) -> float:
    res = divergence_residuals(ops, directions)
    return float(res.max()) if res.size else 0.0
