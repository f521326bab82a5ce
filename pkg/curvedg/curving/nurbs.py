# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Rational B-spline surfaces on the parameter square [0,1]^2.

Text format (one record per line, '#' comments allowed):

    NURBS 1
    <degree_u> <degree_v>
    <n_u> <n_v>
    <knots_u ...>
    <knots_v ...>
    <x y z w>          # n_u * n_v rows, u index outer, v index inner
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import List, Sequence, TextIO, Tuple, Union

import numpy as np

from ..core.exceptions import ConfigError, DomainError, FormatError
from ..core.utils import U

PARAM_TOL = 1e-14
MAGIC = "NURBS"
VERSION = 1
SEED_GRID = 9


def find_span(n: int, p: int, u: float, knots: np.ndarray) -> int:
    """Knot span index for parameter u; n is the last control point index."""
    if u >= knots[n + 1]:
        return n
    if u <= knots[p]:
        return p
    lo, hi = p, n + 1
    mid = (lo + hi) // 2
    while u < knots[mid] or u >= knots[mid + 1]:
        if u < knots[mid]:
            hi = mid
        else:
            lo = mid
        mid = (lo + hi) // 2
    return mid


def basis_funs_derivs(span: int, u: float, p: int, n_der: int, knots: np.ndarray) -> np.ndarray:
    """Nonzero basis functions and derivatives up to n_der at u, shape (n_der+1, p+1)."""
    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = u - knots[span + 1 - j]
        right[j] = knots[span + j] - u
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((n_der + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, n_der + 1):
            d = 0.0
            rk, pk = r - k, p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1
    fac = p
    for k in range(1, n_der + 1):
        ders[k] *= fac
        fac *= p - k
    return ders


def _check_knots(knots: np.ndarray, degree: int, n_ctrl: int, name: str) -> None:
    if degree < 1:
        raise ConfigError(msg=f"{name}: degree must be >= 1, got {degree}")
    if knots.ndim != 1 or knots.size != n_ctrl + degree + 1:
        raise ConfigError(msg=f"{name}: expected {n_ctrl + degree + 1} knots, got {knots.size}")
    if np.any(np.diff(knots) < 0):
        raise ConfigError(msg=f"{name}: knot vector must be nondecreasing")
    if not (np.all(knots[: degree + 1] == 0.0) and np.all(knots[-degree - 1:] == 1.0)):
        raise ConfigError(msg=f"{name}: knot vector must be clamped on [0, 1]")
    _, mult = np.unique(knots, return_counts=True)
    if mult.max() > degree + 1:
        raise ConfigError(msg=f"{name}: knot multiplicity exceeds degree + 1")


@dataclass(frozen=True, eq=False)
class NurbsSurface:
    degree_u: int
    degree_v: int
    knots_u: np.ndarray
    knots_v: np.ndarray
    control: np.ndarray  # (n_u, n_v, 3)
    weights: np.ndarray  # (n_u, n_v)
    name: str = field(default="surface", compare=False)

    def __post_init__(self) -> None:
        ku = np.asarray(self.knots_u, dtype=float)
        kv = np.asarray(self.knots_v, dtype=float)
        cp = np.asarray(self.control, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if cp.ndim != 3 or cp.shape[2] != 3:
            raise ConfigError(msg=f"control net must have shape (n_u, n_v, 3), got {cp.shape}")
        if w.shape != cp.shape[:2]:
            raise ConfigError(msg="weights must match the control net")
        if np.any(w <= 0.0):
            raise ConfigError(msg="NURBS weights must be positive")
        _check_knots(ku, int(self.degree_u), cp.shape[0], "knots_u")
        _check_knots(kv, int(self.degree_v), cp.shape[1], "knots_v")
        for name, arr in (("knots_u", ku), ("knots_v", kv), ("control", cp), ("weights", w)):
            arr = np.array(arr, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @cached_property
    def homogeneous(self) -> np.ndarray:
        """Weighted control net (w x, w y, w z, w)."""
        cpw = np.concatenate([self.control * self.weights[..., None], self.weights[..., None]], axis=-1)
        cpw.setflags(write=False)
        return cpw

    def _check_param(self, a: float, b: float) -> Tuple[float, float]:
        if not (-PARAM_TOL <= a <= 1.0 + PARAM_TOL and -PARAM_TOL <= b <= 1.0 + PARAM_TOL):
            raise DomainError(msg=f"surface parameter ({a!r}, {b!r}) outside [0,1]^2", context={"surface": self.name})
        return min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)

    def _homogeneous_derivs(self, a: float, b: float, n_der: int) -> np.ndarray:
        """Aw derivatives [k, l, 4] for k + l <= n_der."""
        pu, pv = self.degree_u, self.degree_v
        nu, nv = self.control.shape[0] - 1, self.control.shape[1] - 1
        su = find_span(nu, pu, a, self.knots_u)
        sv = find_span(nv, pv, b, self.knots_v)
        Nu = basis_funs_derivs(su, a, pu, min(n_der, pu), self.knots_u)
        Nv = basis_funs_derivs(sv, b, pv, min(n_der, pv), self.knots_v)
        block = self.homogeneous[su - pu: su + 1, sv - pv: sv + 1]
        out = np.zeros((n_der + 1, n_der + 1, 4))
        for k in range(min(n_der, pu) + 1):
            for l in range(min(n_der - k, pv) + 1):
                out[k, l] = np.einsum("i,j,ijc->c", Nu[k], Nv[l], block)
        return out

    def eval(self, a: float, b: float) -> np.ndarray:
        a, b = self._check_param(float(a), float(b))
        aw = self._homogeneous_derivs(a, b, 0)[0, 0]
        return aw[:3] / aw[3]

    def eval_derivs(self, a: float, b: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Point and exact first partials of the rational map."""
        a, b = self._check_param(float(a), float(b))
        d = self._homogeneous_derivs(a, b, 1)
        A, w = d[0, 0, :3], d[0, 0, 3]
        S = A / w
        Su = (d[1, 0, :3] - d[1, 0, 3] * S) / w
        Sv = (d[0, 1, :3] - d[0, 1, 3] * S) / w
        return S, Su, Sv

    def eval_second_derivs(self, a: float, b: float) -> np.ndarray:
        """Partials D[k, l] = d^(k+l) S / du^k dv^l for k + l <= 2, shape (3, 3, 3)."""
        a, b = self._check_param(float(a), float(b))
        d = self._homogeneous_derivs(a, b, 2)
        A, w = d[..., :3], d[..., 3]
        out = np.zeros((3, 3, 3))
        for k in range(3):
            for l in range(3 - k):
                v = A[k, l].copy()
                for j in range(1, l + 1):
                    v -= comb(l, j) * w[0, j] * out[k, l - j]
                for i in range(1, k + 1):
                    v -= comb(k, i) * w[i, 0] * out[k - i, l]
                    for j in range(1, l + 1):
                        v -= comb(k, i) * comb(l, j) * w[i, j] * out[k - i, l - j]
                out[k, l] = v / w[0, 0]
        return out

    @cached_property
    def seed_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        """Parameters (G, 2) and points (G, 3) of the closest-point seed scan."""
        t = np.linspace(0.0, 1.0, SEED_GRID)
        params = np.array([(a, b) for a in t for b in t])
        pts = np.array([self.eval(a, b) for a, b in params])
        params.setflags(write=False)
        pts.setflags(write=False)
        return params, pts


def eval_surface(surface: NurbsSurface, a: float, b: float) -> np.ndarray:
    return surface.eval(a, b)


def eval_surface_derivs(surface: NurbsSurface, a: float, b: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return surface.eval_derivs(a, b)


# builtin generators


def _arc(a0: float, a1: float) -> Tuple[np.ndarray, np.ndarray]:
    """Rational quadratic arc of the unit circle from angle a0 to a1 (|a1-a0| < pi)."""
    half = 0.5 * (a1 - a0)
    mid = 0.5 * (a0 + a1)
    pts = np.array([
        [np.cos(a0), np.sin(a0)],
        [np.cos(mid) / np.cos(half), np.sin(mid) / np.cos(half)],
        [np.cos(a1), np.sin(a1)],
    ])
    return pts, np.array([1.0, np.cos(half), 1.0])


_QUADRATIC_KNOTS = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
_LINEAR_KNOTS = np.array([0.0, 0.0, 1.0, 1.0])


def flat_patch(p00: Sequence[float], p10: Sequence[float], p01: Sequence[float], p11: Sequence[float]) -> NurbsSurface:
    cp = np.array([[p00, p01], [p10, p11]], dtype=float)
    return NurbsSurface(1, 1, _LINEAR_KNOTS, _LINEAR_KNOTS, cp, np.ones((2, 2)), name="flat")


def sphere_patch(
    center: Sequence[float] = (0.0, 0.0, 0.0),
    radius: float = 1.0,
    longitude: Tuple[float, float] = (0.0, 0.5 * np.pi),
    latitude: Tuple[float, float] = (0.0, 0.5 * np.pi),
) -> NurbsSurface:
    """
    Exact spherical patch: u runs over longitude, v over latitude (radians,
    measured from the equator). Each window must span less than pi.
    """
    if radius <= 0:
        raise ConfigError(msg=f"sphere radius must be positive, got {radius}")
    for lo, hi in (longitude, latitude):
        if not 0.0 < hi - lo < np.pi:
            raise ConfigError(msg="sphere patch windows must satisfy 0 < hi - lo < pi")
    lon, wlon = _arc(*longitude)
    lat, wlat = _arc(*latitude)
    cp = np.empty((3, 3, 3))
    for i in range(3):
        for j in range(3):
            cp[i, j] = [lat[j, 0] * lon[i, 0], lat[j, 0] * lon[i, 1], lat[j, 1]]
    cp = np.asarray(center, dtype=float) + radius * cp
    w = np.outer(wlon, wlat)
    return NurbsSurface(2, 2, _QUADRATIC_KNOTS, _QUADRATIC_KNOTS, cp, w, name="sphere")


def cylinder_patch(
    radius: float = 1.0,
    angle: Tuple[float, float] = (0.0, 0.5 * np.pi),
    z_range: Tuple[float, float] = (0.0, 1.0),
    center: Sequence[float] = (0.0, 0.0, 0.0),
) -> NurbsSurface:
    """Circular cylinder around the z axis: u runs over the angle, v along z."""
    if radius <= 0:
        raise ConfigError(msg=f"cylinder radius must be positive, got {radius}")
    if not 0.0 < angle[1] - angle[0] < np.pi:
        raise ConfigError(msg="cylinder patch angle window must satisfy 0 < hi - lo < pi")
    arc, warc = _arc(*angle)
    cp = np.empty((3, 2, 3))
    for i in range(3):
        for j, z in enumerate(z_range):
            cp[i, j] = [radius * arc[i, 0], radius * arc[i, 1], z]
    cp = cp + np.asarray(center, dtype=float)
    w = np.repeat(warc[:, None], 2, axis=1)
    return NurbsSurface(2, 1, _QUADRATIC_KNOTS, _LINEAR_KNOTS, cp, w, name="cylinder")


# text I/O


def format_nurbs(surfaces: Sequence[NurbsSurface]) -> str:
    lines: List[str] = []
    for s in surfaces:
        nu, nv = s.weights.shape
        lines.append(f"{MAGIC} {VERSION}")
        lines.append(f"{s.degree_u} {s.degree_v}")
        lines.append(f"{nu} {nv}")
        lines.append(" ".join(repr(float(k)) for k in s.knots_u))
        lines.append(" ".join(repr(float(k)) for k in s.knots_v))
        for i in range(nu):
            for j in range(nv):
                x, y, z = s.control[i, j].tolist()
                lines.append(f"{x!r} {y!r} {z!r} {float(s.weights[i, j])!r}")
    return "\n".join(lines) + "\n"


def _tokens(stream: TextIO) -> List[Tuple[int, List[str]]]:
    rows = []
    for lineno, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            rows.append((lineno, text.split()))
    return rows


def parse_nurbs(stream: TextIO) -> List[NurbsSurface]:
    """Parse one or more concatenated surface records."""
    rows = _tokens(stream)
    out: List[NurbsSurface] = []
    i = 0
    while i < len(rows):
        lineno, head = rows[i]
        if len(head) != 2 or head[0] != MAGIC:
            raise FormatError(msg=f"line {lineno}: expected '{MAGIC} {VERSION}' header")
        if head[1] != str(VERSION):
            raise FormatError(msg=f"line {lineno}: unsupported NURBS format version {head[1]}")
        try:
            pu, pv = (int(t) for t in rows[i + 1][1])
            nu, nv = (int(t) for t in rows[i + 2][1])
            ku = np.array([float(t) for t in rows[i + 3][1]])
            kv = np.array([float(t) for t in rows[i + 4][1]])
            net = np.array([[float(t) for t in rows[i + 5 + r][1]] for r in range(nu * nv)])
        except (IndexError, ValueError) as e:
            raise FormatError(msg=f"malformed NURBS record starting at line {lineno}", cause=e) from e
        if net.shape != (nu * nv, 4):
            raise FormatError(msg=f"line {lineno}: control rows must be 'x y z w'")
        net = net.reshape(nu, nv, 4)
        try:
            out.append(NurbsSurface(pu, pv, ku, kv, net[..., :3], net[..., 3], name=f"patch{len(out)}"))
        except ConfigError as e:
            raise FormatError(msg=f"line {lineno}: {e.msg}", cause=e) from e
        i += 5 + nu * nv
    if not out:
        raise FormatError(msg="no NURBS surface in input")
    return out


def read_nurbs(path: Union[str, Path]) -> List[NurbsSurface]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(msg=f"NURBS file not found: {p}", context={"path": str(p)})
    with open(p, "r", encoding="utf-8") as fh:
        return parse_nurbs(fh)


def write_nurbs(surfaces: Sequence[NurbsSurface], path: Union[str, Path]) -> Path:
    out = Path(path)
    U.atomic_write_text(out, format_nurbs(surfaces))
    return out
