# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Orthonormal hierarchical modal basis on the reference tetrahedron

    T = {(r, s, t) : r, s, t >= -1, r + s + t <= -1}

built from Jacobi polynomials in collapsed coordinates. Modes are ordered by
total degree first, so the first N_{p-1} columns of a degree-p evaluation are
the complete degree-(p-1) basis.
"""
from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import eval_jacobi, gammaln

from ..core.exceptions import ConfigError, DomainError

DOMAIN_TOL = 1e-10
_COLLAPSE_TOL = 1e-13


def n_basis(p: int, dim: int = 3) -> int:
    """Number of polynomials of total degree <= p in `dim` variables."""
    if p < 0:
        raise ConfigError(msg=f"polynomial degree must be >= 0, got {p}")
    out = 1
    for i in range(1, dim + 1):
        out = out * (p + i) // i
    return out


@lru_cache(maxsize=None)
def mode_indices(p: int) -> Tuple[Tuple[int, int, int], ...]:
    """(i, j, k) exponents per mode, grouped by total degree."""
    out: List[Tuple[int, int, int]] = []
    for d in range(p + 1):
        for i in range(d + 1):
            for j in range(d - i + 1):
                out.append((i, j, d - i - j))
    return tuple(out)


def jacobi_normalized(x: np.ndarray, alpha: float, beta: float, n: int) -> np.ndarray:
    """P_n^(alpha,beta) scaled to unit norm under the weight (1-x)^alpha (1+x)^beta on [-1, 1]."""
    log_h = (
        (alpha + beta + 1.0) * np.log(2.0)
        - np.log(2.0 * n + alpha + beta + 1.0)
        + gammaln(n + alpha + 1.0)
        + gammaln(n + beta + 1.0)
        - gammaln(n + alpha + beta + 1.0)
        - gammaln(n + 1.0)
    )
    return eval_jacobi(n, alpha, beta, x) / np.sqrt(np.exp(log_h))


def grad_jacobi_normalized(x: np.ndarray, alpha: float, beta: float, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return np.sqrt(n * (n + alpha + beta + 1.0)) * jacobi_normalized(x, alpha + 1.0, beta + 1.0, n - 1)


def barycentric(points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates w.r.t. vertices (-1,-1,-1), (1,-1,-1), (-1,1,-1), (-1,-1,1)."""
    r, s, t = points[:, 0], points[:, 1], points[:, 2]
    return np.stack([-(1.0 + r + s + t) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0, (1.0 + t) / 2.0], axis=1)


def check_in_tet(points: np.ndarray, tol: float = DOMAIN_TOL) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 3:
        raise DomainError(msg=f"expected points of shape (n, 3), got {pts.shape}")
    lam = barycentric(pts)
    bad = np.nonzero(np.any(lam < -tol, axis=1) | np.any(lam > 1.0 + tol, axis=1))[0]
    if bad.size:
        raise DomainError(
            msg=f"{bad.size} point(s) outside the reference tetrahedron",
            context={"first_index": int(bad[0]), "point": pts[bad[0]].tolist()},
        )
    return pts


def rst_to_abc(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, s, t = points[:, 0], points[:, 1], points[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(np.abs(s + t) > _COLLAPSE_TOL, 2.0 * (1.0 + r) / (-s - t) - 1.0, -1.0)
        b = np.where(np.abs(1.0 - t) > _COLLAPSE_TOL, 2.0 * (1.0 + s) / (1.0 - t) - 1.0, -1.0)
    return a, b, t.copy()


def _simplex_mode(a: np.ndarray, b: np.ndarray, c: np.ndarray, i: int, j: int, k: int) -> np.ndarray:
    h1 = jacobi_normalized(a, 0.0, 0.0, i)
    h2 = jacobi_normalized(b, 2.0 * i + 1.0, 0.0, j)
    h3 = jacobi_normalized(c, 2.0 * (i + j) + 2.0, 0.0, k)
    return 2.0 * np.sqrt(2.0) * h1 * h2 * (1.0 - b) ** i * h3 * (1.0 - c) ** (i + j)


def _simplex_mode_grad(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, i: int, j: int, k: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    fa = jacobi_normalized(a, 0.0, 0.0, i)
    dfa = grad_jacobi_normalized(a, 0.0, 0.0, i)
    gb = jacobi_normalized(b, 2.0 * i + 1.0, 0.0, j)
    dgb = grad_jacobi_normalized(b, 2.0 * i + 1.0, 0.0, j)
    hc = jacobi_normalized(c, 2.0 * (i + j) + 2.0, 0.0, k)
    dhc = grad_jacobi_normalized(c, 2.0 * (i + j) + 2.0, 0.0, k)
    hb = 0.5 * (1.0 - b)
    hcc = 0.5 * (1.0 - c)

    dr = dfa * gb * hc
    if i > 0:
        dr = dr * hb ** (i - 1)
    if i + j > 0:
        dr = dr * hcc ** (i + j - 1)

    ds = 0.5 * (1.0 + a) * dr
    tmp = dgb * hb**i
    if i > 0:
        tmp = tmp + (-0.5 * i) * (gb * hb ** (i - 1))
    if i + j > 0:
        tmp = tmp * hcc ** (i + j - 1)
    tmp = fa * (tmp * hc)
    ds = ds + tmp

    dt = 0.5 * (1.0 + a) * dr + 0.5 * (1.0 + b) * tmp
    tmp = dhc * hcc ** (i + j)
    if i + j > 0:
        tmp = tmp - 0.5 * (i + j) * (hc * hcc ** (i + j - 1))
    tmp = fa * (gb * tmp) * hb**i
    dt = dt + tmp

    scale = 2.0 ** (2 * i + j + 1.5)
    return dr * scale, ds * scale, dt * scale


def modal_basis_eval(p: int, points: np.ndarray) -> np.ndarray:
    """Matrix [n_points x N_p] with column j = psi_j at each point."""
    pts = check_in_tet(points)
    a, b, c = rst_to_abc(pts)
    modes = mode_indices(p)
    out = np.empty((pts.shape[0], len(modes)))
    for col, (i, j, k) in enumerate(modes):
        out[:, col] = _simplex_mode(a, b, c, i, j, k)
    return out


def modal_basis_grad(p: int, points: np.ndarray) -> np.ndarray:
    """Array [3, n_points, N_p]: d/dr, d/ds, d/dt of every mode."""
    pts = check_in_tet(points)
    a, b, c = rst_to_abc(pts)
    modes = mode_indices(p)
    out = np.empty((3, pts.shape[0], len(modes)))
    for col, (i, j, k) in enumerate(modes):
        out[0, :, col], out[1, :, col], out[2, :, col] = _simplex_mode_grad(a, b, c, i, j, k)
    return out


def vandermonde(p: int, nodes: np.ndarray) -> np.ndarray:
    return modal_basis_eval(p, nodes)


def grad_vandermonde(p: int, nodes: np.ndarray) -> np.ndarray:
    return modal_basis_grad(p, nodes)
