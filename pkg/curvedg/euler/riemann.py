# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
import threading
from typing import Callable, Dict, Optional

import numpy as np

from ..core.exceptions import ConfigError
from ..core.logger import TRACE
from .state import ENERGY, MX, RHO, GasModel, check_admissible, normal_flux, pressure_unchecked

_LOG = logging.getLogger("curvedg.euler")

RiemannFlux = Callable[..., np.ndarray]


class FallbackCounter:
    """Thread-safe tally of HLLC faces that fell back to local Lax-Friedrichs."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def add(self, n: int) -> None:
        if n:
            with self._lock:
                self._count += int(n)

    @property
    def count(self) -> int:
        with self._lock:
            return self._count

    def take(self) -> int:
        with self._lock:
            n, self._count = self._count, 0
            return n


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def llf_flux(UL: np.ndarray, UR: np.ndarray, n: np.ndarray, gas: GasModel, *, checked: bool = True, **_: object) -> np.ndarray:
    """Local Lax-Friedrichs: 1/2 (F(UL) + F(UR)) . n - lambda/2 (UR - UL)."""
    UL = np.asarray(UL, dtype=float)
    UR = np.asarray(UR, dtype=float)
    n = np.asarray(n, dtype=float)
    if checked:
        check_admissible(UL, gas, where="left Riemann state")
        check_admissible(UR, gas, where="right Riemann state")
    lam = np.maximum(_wavespeed(UL, n, gas), _wavespeed(UR, n, gas))
    fl = normal_flux(UL, n, gas, checked=False)
    fr = normal_flux(UR, n, gas, checked=False)
    return 0.5 * (fl + fr) - 0.5 * lam[..., None] * (UR - UL)


def _wavespeed(U: np.ndarray, n: np.ndarray, gas: GasModel) -> np.ndarray:
    c = np.sqrt(gas.gamma * pressure_unchecked(U, gas) / U[..., RHO])
    return np.abs(_dot(U[..., MX:ENERGY], n) / U[..., RHO]) + c


def hllc_flux(
    UL: np.ndarray,
    UR: np.ndarray,
    n: np.ndarray,
    gas: GasModel,
    *,
    checked: bool = True,
    counter: Optional[FallbackCounter] = None,
) -> np.ndarray:
    """
    Three-wave HLLC flux with Einfeldt wave-speed bounds (Roe averages).
    Points with degenerate wave speeds use llf_flux and are added to `counter`.
    """
    UL = np.asarray(UL, dtype=float)
    UR = np.asarray(UR, dtype=float)
    n = np.broadcast_to(np.asarray(n, dtype=float), np.broadcast_shapes(UL.shape[:-1], UR.shape[:-1]) + (3,))
    UL, UR = np.broadcast_arrays(UL, UR)
    if checked:
        check_admissible(UL, gas, where="left Riemann state")
        check_admissible(UR, gas, where="right Riemann state")
    g = gas.gamma

    rl, rr = UL[..., RHO], UR[..., RHO]
    vl = UL[..., MX:ENERGY] / rl[..., None]
    vr = UR[..., MX:ENERGY] / rr[..., None]
    pl = pressure_unchecked(UL, gas)
    pr = pressure_unchecked(UR, gas)
    unl, unr = _dot(vl, n), _dot(vr, n)
    cl, cr = np.sqrt(g * pl / rl), np.sqrt(g * pr / rr)
    hl = (UL[..., ENERGY] + pl) / rl
    hr = (UR[..., ENERGY] + pr) / rr

    sl_, sr_ = np.sqrt(rl), np.sqrt(rr)
    wsum = sl_ + sr_
    v_roe = (sl_[..., None] * vl + sr_[..., None] * vr) / wsum[..., None]
    h_roe = (sl_ * hl + sr_ * hr) / wsum
    with np.errstate(invalid="ignore"):
        c_roe = np.sqrt((g - 1.0) * (h_roe - 0.5 * _dot(v_roe, v_roe)))
    un_roe = _dot(v_roe, n)

    SL = np.minimum(unl - cl, un_roe - c_roe)
    SR = np.maximum(unr + cr, un_roe + c_roe)
    dl = rl * (SL - unl)
    dr = rr * (SR - unr)
    denom = dl - dr
    with np.errstate(divide="ignore", invalid="ignore"):
        s_star = (pr - pl + dl * unl - dr * unr) / denom

    degenerate = ~(np.isfinite(SL) & np.isfinite(SR) & np.isfinite(s_star) & (SL < SR))
    degenerate |= ~((SL <= s_star) & (s_star <= SR)) & ~degenerate & ~((SL >= 0) | (SR <= 0))

    fl = normal_flux(UL, n, gas, checked=False)
    fr = normal_flux(UR, n, gas, checked=False)

    def star(U, rho, v, p, un, S):
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = rho * (S - un) / (S - s_star)
            out = np.empty(U.shape)
            out[..., RHO] = fac
            out[..., MX:ENERGY] = fac[..., None] * (v + (s_star - un)[..., None] * n)
            out[..., ENERGY] = fac * (U[..., ENERGY] / rho + (s_star - un) * (s_star + p / (rho * (S - un))))
        return out

    usl = star(UL, rl, vl, pl, unl, SL)
    usr = star(UR, rr, vr, pr, unr, SR)
    F = np.where(
        (SL >= 0)[..., None],
        fl,
        np.where(
            (SR <= 0)[..., None],
            fr,
            np.where((s_star >= 0)[..., None], fl + SL[..., None] * (usl - UL), fr + SR[..., None] * (usr - UR)),
        ),
    )

    if degenerate.any():
        F = np.array(F)
        F[degenerate] = llf_flux(UL[degenerate], UR[degenerate], n[degenerate], gas, checked=False)
        nbad = int(degenerate.sum())
        if counter is not None:
            counter.add(nbad)
        _LOG.log(TRACE, "HLLC fell back to LLF at %d points", nbad)
    return F


RIEMANN_SOLVERS: Dict[str, RiemannFlux] = {"llf": llf_flux, "hllc": hllc_flux}


def riemann_solver(name: str) -> RiemannFlux:
    key = str(name).strip().lower()
    if key not in RIEMANN_SOLVERS:
        raise ConfigError(msg=f"unknown Riemann solver {name!r}", context={"choices": sorted(RIEMANN_SOLVERS)})
    return RIEMANN_SOLVERS[key]
