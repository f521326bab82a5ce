# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Volume cubature and face quadrature on the reference simplices.

Volume: Grundmann-Moeller rules (strength 2s+1) mapped to the reference
tetrahedron; weights may be negative for s >= 1 and always sum to 4/3.
Faces: fully symmetric triangle rules up to degree 8, above that an
S3-symmetrised collapsed Gauss-Jacobi rule. Face weights sum to 2, the area
of the parameter triangle (-1,-1), (1,-1), (-1,1).
A collapsed Gauss-Jacobi tetrahedron rule is provided as a dense oracle.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import roots_jacobi

from ..core.exceptions import ConfigError

REF_VERTICES = np.array(
    [[-1.0, -1.0, -1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
)
TET_VOLUME = 4.0 / 3.0
TRI_AREA = 2.0


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def grundmann_moeller(s: int, dim: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes (n, dim+1) and weights on the unit simplex (sum 1/dim!)."""
    if s < 0:
        raise ConfigError(msg=f"Grundmann-Moeller index must be >= 0, got {s}")
    d = 2 * s + 1
    bary: List[Tuple[float, ...]] = []
    weights: List[float] = []
    for i in range(s + 1):
        w = (-1.0) ** i * 2.0 ** (-2 * s) * float(d + dim - 2 * i) ** d / (factorial(i) * factorial(d + dim - i))
        denom = float(d + dim - 2 * i)
        for beta in _compositions(s - i, dim + 1):
            bary.append(tuple((2.0 * b + 1.0) / denom for b in beta))
            weights.append(w)
    return np.array(bary), np.array(weights)


def build_cubature(p: int, strength: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reference-tet cubature exact to degree 2p+1 (or `strength`, rounded up to odd).
    Returns (nodes (n, 3), weights (n,)).
    """
    if p < 1 and strength is None:
        raise ConfigError(msg=f"cubature requires p >= 1, got {p}")
    q = 2 * p + 1 if strength is None else int(strength)
    if q < 1:
        raise ConfigError(msg=f"cubature strength must be >= 1, got {q}")
    s = q // 2
    bary, w = grundmann_moeller(s)
    nodes = bary @ REF_VERTICES
    return nodes, w * (TET_VOLUME * 6.0)


def _gauss_jacobi(n: int, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_jacobi(n, alpha, 0.0)
    return np.asarray(x), np.asarray(w)


def collapsed_tet_rule(q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Jacobi rule on the reference tet, exact to degree q."""
    n = q // 2 + 1
    xa, wa = _gauss_jacobi(n, 0.0)
    xb, wb = _gauss_jacobi(n, 1.0)
    xc, wc = _gauss_jacobi(n, 2.0)
    a, b, c = np.meshgrid(xa, xb, xc, indexing="ij")
    w = (wa[:, None, None] * wb[None, :, None] * wc[None, None, :]) / 8.0
    r = (1.0 + a) * (1.0 - b) * (1.0 - c) / 4.0 - 1.0
    s = (1.0 + b) * (1.0 - c) / 2.0 - 1.0
    nodes = np.column_stack([r.ravel(), s.ravel(), c.ravel()])
    return nodes, w.ravel()


def collapsed_tri_rule(q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule on the parameter triangle (-1,-1), (1,-1), (-1,1), exact to degree q."""
    n = q // 2 + 1
    xa, wa = _gauss_jacobi(n, 0.0)
    xb, wb = _gauss_jacobi(n, 1.0)
    a, b = np.meshgrid(xa, xb, indexing="ij")
    w = (wa[:, None] * wb[None, :]) / 2.0
    u = (1.0 + a) * (1.0 - b) / 2.0 - 1.0
    return np.column_stack([u.ravel(), b.ravel()]), w.ravel()


# Symmetric triangle rules keyed by degree: (orbit, generator, weight) with
# weights normalised to unit area. S3 is the centroid, S21 is (a, b, b) with
# b = (1 - a) / 2, S111 is (a, b, 1 - a - b) and its permutations.
_SYMMETRIC_TRI_RULES: Dict[int, List[Tuple[str, Tuple[float, ...], float]]] = {
    2: [("S21", (2.0 / 3.0,), 1.0 / 3.0)],
    4: [
        ("S21", (0.108103018168070,), 0.223381589678011),
        ("S21", (0.816847572980459,), 0.109951743655322),
    ],
    6: [
        ("S21", (0.501426509658179,), 0.116786275726379),
        ("S21", (0.873821971016996,), 0.050844906370207),
        ("S111", (0.053145049844817, 0.310352451033784), 0.082851075618374),
    ],
    8: [
        ("S3", (), 0.144315607677787),
        ("S21", (0.081414823414554,), 0.095091634267285),
        ("S21", (0.658861384496480,), 0.103217370534718),
        ("S21", (0.898905543365938,), 0.032458497623198),
        ("S111", (0.008394777409958, 0.263112829634638), 0.027230314174435),
    ],
}


def _orbit(kind: str, gen: Tuple[float, ...]) -> List[Tuple[float, float, float]]:
    if kind == "S3":
        third = 1.0 / 3.0
        return [(third, third, third)]
    if kind == "S21":
        a = gen[0]
        b = (1.0 - a) / 2.0
        return [(a, b, b), (b, a, b), (b, b, a)]
    a, b = gen
    c = 1.0 - a - b
    return sorted(set(permutations((a, b, c))))


def _symmetrize(bary: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pts = []
    wts = []
    for perm in permutations(range(3)):
        pts.append(bary[:, list(perm)])
        wts.append(w / 6.0)
    return np.vstack(pts), np.concatenate(wts)


@lru_cache(maxsize=None)
def triangle_rule(q: int) -> Tuple[np.ndarray, np.ndarray]:
    """S3-invariant rule of degree >= q: (barycentric (n, 3), weights summing to 2)."""
    degree = max(2, q + (q % 2))
    if degree in _SYMMETRIC_TRI_RULES:
        bary: List[Tuple[float, float, float]] = []
        wts: List[float] = []
        for kind, gen, w in _SYMMETRIC_TRI_RULES[degree]:
            orbit = _orbit(kind, gen)
            bary.extend(orbit)
            wts.extend([w] * len(orbit))
        b = np.array(bary)
        w_arr = np.array(wts)
    else:
        uv, w0 = collapsed_tri_rule(degree)
        l2 = (1.0 + uv[:, 0]) / 2.0
        l3 = (1.0 + uv[:, 1]) / 2.0
        b, w_arr = _symmetrize(np.column_stack([1.0 - l2 - l3, l2, l3]), w0)
    w_arr = w_arr / w_arr.sum() * TRI_AREA
    b.setflags(write=False)
    w_arr.setflags(write=False)
    return b, w_arr


def build_face_quadrature(p: int, face_vertex_ids: Tuple[Tuple[int, int, int], ...]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Degree-2p triangle rule replicated on the four reference faces.
    Returns (face nodes (4, Ng, 3), weights (Ng,), barycentric (Ng, 3)).
    """
    if p < 1:
        raise ConfigError(msg=f"face quadrature requires p >= 1, got {p}")
    bary, w = triangle_rule(2 * p)
    nodes = np.stack([bary @ REF_VERTICES[list(ids)] for ids in face_vertex_ids])
    return nodes, np.array(w), np.array(bary)
