# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import CurvingError, DomainError
from .nurbs import NurbsSurface

_LOG = logging.getLogger("curvedg.curving.projection")

MAX_ITERATIONS = 100
STEP_TOL = 1e-12
STATIONARITY_TOL = 1e-10
FALLBACK_TOL = 1e-6
MULTISTART = 5
_ARMIJO = 1e-4
_MAX_HALVINGS = 40
# below this projected gradient Newton steps replace Gauss-Newton
_NEWTON_SWITCH = 1e-6


@dataclass(frozen=True)
class Projection:
    alpha: float
    beta: float
    distance: float
    point: np.ndarray
    stationarity: float
    iterations: int
    converged: bool


def _stationarity(theta: np.ndarray, grad: np.ndarray) -> float:
    return float(np.linalg.norm(np.clip(theta - grad, 0.0, 1.0) - theta))


def _newton_step(surface: NurbsSurface, x: np.ndarray, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """
    Full Newton step on the free parameters, with the exact Hessian
    J^T J + sum_c r_c D^2 S_c. Levenberg-Marquardt damping replaces it when
    the Hessian is not positive definite.
    """
    D = surface.eval_second_derivs(*theta)
    r = D[0, 0] - x
    J = np.column_stack([D[1, 0], D[0, 1]])
    H = J.T @ J + np.array([[r @ D[2, 0], r @ D[1, 1]], [r @ D[1, 1], r @ D[0, 2]]])
    free = ~(((theta <= 0.0) & (grad > 0.0)) | ((theta >= 1.0) & (grad < 0.0)))
    step = np.zeros(2)
    if not free.any():
        return theta
    Hf = H[np.ix_(free, free)]
    lam = np.linalg.eigvalsh(Hf)
    if lam.min() <= 1e-14 * max(1.0, abs(lam.max())):
        Hf = Hf + (abs(lam.min()) + 1e-8 * max(1.0, abs(lam.max()))) * np.eye(Hf.shape[0])
    step[free] = np.linalg.solve(Hf, -grad[free])
    return np.clip(theta + step, 0.0, 1.0)


def _gauss_newton(surface: NurbsSurface, x: np.ndarray, theta0: Sequence[float]) -> Projection:
    """
    Projected Gauss-Newton on 1/2 |S(a,b) - x|^2 over the unit square. Near
    the minimum, or when the Armijo search stalls, full Newton steps take
    over for as long as they reduce the projected gradient.
    Success means stationarity < STATIONARITY_TOL and nothing weaker.
    """
    theta = np.clip(np.asarray(theta0, dtype=float), 0.0, 1.0)
    S, Sa, Sb = surface.eval_derivs(*theta)
    r = S - x
    f = 0.5 * float(r @ r)
    stat = np.inf
    it = 0
    newton = False
    for it in range(1, MAX_ITERATIONS + 1):
        J = np.column_stack([Sa, Sb])
        grad = J.T @ r
        stat = _stationarity(theta, grad)
        if stat < STATIONARITY_TOL:
            break
        newton = newton or stat < _NEWTON_SWITCH
        if newton:
            trial = _newton_step(surface, x, theta, grad)
        else:
            delta = np.linalg.lstsq(J, -r, rcond=None)[0]
            t = 1.0
            trial = theta
            for _ in range(_MAX_HALVINGS):
                cand = np.clip(theta + t * delta, 0.0, 1.0)
                r_t = surface.eval(*cand) - x
                if 0.5 * float(r_t @ r_t) <= f + _ARMIJO * float(grad @ (cand - theta)):
                    trial = cand
                    break
                t *= 0.5
        if float(np.linalg.norm(trial - theta)) < STEP_TOL:
            if newton:
                break
            newton = True
            continue
        S_t, Sa_t, Sb_t = surface.eval_derivs(*trial)
        r_t = S_t - x
        stat_t = _stationarity(trial, np.column_stack([Sa_t, Sb_t]).T @ r_t)
        if newton and stat_t >= stat:
            break
        theta, S, Sa, Sb, r = trial, S_t, Sa_t, Sb_t, r_t
        f = 0.5 * float(r @ r)
        stat = stat_t
    return Projection(
        alpha=float(theta[0]),
        beta=float(theta[1]),
        distance=float(np.sqrt(2.0 * f)),
        point=S,
        stationarity=stat,
        iterations=it,
        converged=stat < STATIONARITY_TOL,
    )


def closest_point(
    surface: NurbsSurface,
    x: Sequence[float],
    initial: Optional[Tuple[float, float]] = None,
    *,
    logger: Optional[logging.Logger] = None,
) -> Projection:
    """
    Box-constrained closest point on `surface`. Seeds from the surface's 9x9
    parameter grid unless `initial` is given; on non-convergence retries from a
    5x5 multistart grid and keeps the nearest result.
    """
    log = logger or _LOG
    xp = np.asarray(x, dtype=float)
    if initial is None:
        params, pts = surface.seed_grid
        initial = tuple(params[int(np.argmin(np.sum((pts - xp) ** 2, axis=1)))])
    best = _gauss_newton(surface, xp, initial)
    if best.converged:
        return best

    log.warning(
        "Closest-point search on %s did not converge from %s (stationarity %.2e); trying multistart",
        surface.name, tuple(round(v, 4) for v in initial), best.stationarity,
    )
    t = np.linspace(0.0, 1.0, MULTISTART)
    for a in t:
        for b in t:
            cand = _gauss_newton(surface, xp, (a, b))
            if cand.stationarity <= FALLBACK_TOL and (
                best.stationarity > FALLBACK_TOL or cand.distance < best.distance
            ):
                best = cand
    if best.stationarity > FALLBACK_TOL:
        raise CurvingError(
            msg="closest-point projection failed",
            context={"surface": surface.name, "point": xp.tolist(), "stationarity": best.stationarity},
        )
    return best


SurfaceSet = Union[NurbsSurface, Iterable[NurbsSurface]]


def boundary_displacement(
    surfaces: SurfaceSet,
    x: Sequence[float],
    *,
    logger: Optional[logging.Logger] = None,
) -> np.ndarray:
    """g(x) = S(a*, b*) - x on the nearest of the given patches."""
    patches = [surfaces] if isinstance(surfaces, NurbsSurface) else list(surfaces)
    if not patches:
        raise CurvingError(msg="no target surface given for boundary displacement")
    xp = np.asarray(x, dtype=float)
    best: Optional[Projection] = None
    for s in patches:
        proj = closest_point(s, xp, logger=logger)
        if best is None or proj.distance < best.distance:
            best = proj
    assert best is not None
    return best.point - xp


def boundary_displacements(
    surfaces: SurfaceSet, points: np.ndarray, *, logger: Optional[logging.Logger] = None
) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return np.array([boundary_displacement(surfaces, p, logger=logger) for p in pts]).reshape(-1, 3)


def sphere_displacement(center: Sequence[float], radius: float, x: np.ndarray) -> np.ndarray:
    """
    Radial projection onto the sphere: x0 + r (x - x0)/|x - x0| - x.
    Accepts one point (3,) or a batch (n, 3).
    """
    x0 = np.asarray(center, dtype=float)
    xp = np.asarray(x, dtype=float)
    d = xp - x0
    dist = np.linalg.norm(d, axis=-1, keepdims=True)
    if np.any(dist < 1e-14):
        raise DomainError(msg="sphere displacement is undefined at the sphere center", context={"center": x0.tolist()})
    return x0 + radius * d / dist - xp
