# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Conserved-variable algebra of the compressible Euler equations.

Every function works on arrays whose last axis holds the five conserved
components (rho, rho*u, rho*v, rho*w, rho*E); leading axes are batch axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigError, NumericsError

N_CONSERVED = 5
RHO, MX, MY, MZ, ENERGY = range(N_CONSERVED)
FIELD_NAMES = ("rho", "rho_u", "rho_v", "rho_w", "rho_E")


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma) or self.gamma <= 1.0:
            raise ConfigError(msg=f"adiabatic index must be > 1, got {self.gamma}")


@dataclass(frozen=True)
class ConservedState:
    """A single state, handy for configuration and tests; kernels use raw arrays."""

    rho: float
    mom: Tuple[float, float, float]
    rhoE: float

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, *self.mom, self.rhoE], dtype=float)

    @classmethod
    def from_array(cls, u: Sequence[float]) -> "ConservedState":
        a = np.asarray(u, dtype=float)
        return cls(rho=float(a[RHO]), mom=(float(a[MX]), float(a[MY]), float(a[MZ])), rhoE=float(a[ENERGY]))

    @classmethod
    def from_primitive(cls, rho: float, velocity: Sequence[float], p: float, gas: GasModel) -> "ConservedState":
        return cls.from_array(primitive_to_conserved(rho, velocity, p, gas))


def _kinetic(U: np.ndarray) -> np.ndarray:
    m = U[..., MX:ENERGY]
    return 0.5 * np.einsum("...i,...i->...", m, m) / U[..., RHO]


def pressure_unchecked(U: np.ndarray, gas: GasModel) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (gas.gamma - 1.0) * (U[..., ENERGY] - _kinetic(U))


def check_admissible(U: np.ndarray, gas: GasModel, *, where: str = "state", elements: Optional[np.ndarray] = None) -> None:
    """
    Raise NumericsError for the first state with rho <= 0, p <= 0 or a non-finite entry.
    For arrays shaped (K, n, 5) the error names the element (via `elements` when given) and node.
    """
    U = np.asarray(U, dtype=float)
    p = pressure_unchecked(U, gas)
    bad = ~(np.isfinite(U).all(axis=-1) & (U[..., RHO] > 0.0) & (p > 0.0))
    if not bad.any():
        return
    idx = tuple(int(i) for i in np.argwhere(bad)[0])
    ctx = {"where": where, "count": int(bad.sum()), "rho": float(U[idx][RHO]), "pressure": float(p[idx])}
    if len(idx) >= 2:
        k = int(elements[idx[0]]) if elements is not None else idx[0]
        ctx.update(element=k, node=idx[1])
        msg = f"inadmissible {where} in element {k} at node {idx[1]} (rho={ctx['rho']:.6g}, p={ctx['pressure']:.6g})"
    else:
        msg = f"inadmissible {where} (rho={ctx['rho']:.6g}, p={ctx['pressure']:.6g})"
    raise NumericsError(msg=msg, context=ctx)


def pressure(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """p = (gamma - 1)(rho E - |m|^2 / (2 rho)); rho <= 0 raises."""
    U = np.asarray(U, dtype=float)
    if np.any(~(U[..., RHO] > 0.0)):
        raise NumericsError(msg="pressure of a state with non-positive density", context={"min_rho": float(np.min(U[..., RHO]))})
    return pressure_unchecked(U, gas)


def velocity(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    return U[..., MX:ENERGY] / U[..., RHO, None]


def sound_speed(U: np.ndarray, gas: GasModel) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    return np.sqrt(gas.gamma * pressure(U, gas) / U[..., RHO])


def mach_number(U: np.ndarray, gas: GasModel) -> np.ndarray:
    return np.linalg.norm(velocity(U), axis=-1) / sound_speed(U, gas)


def flux(U: np.ndarray, gas: GasModel, *, checked: bool = True) -> np.ndarray:
    """(..., 5, 3) flux tensor; column m is the flux in direction x_m."""
    U = np.asarray(U, dtype=float)
    if checked:
        check_admissible(U, gas, where="flux argument")
    p = pressure_unchecked(U, gas)
    v = U[..., MX:ENERGY] / U[..., RHO, None]
    F = np.empty(U.shape[:-1] + (N_CONSERVED, 3))
    F[..., RHO, :] = U[..., MX:ENERGY]
    F[..., MX:ENERGY, :] = U[..., MX:ENERGY, None] * v[..., None, :]
    for m in range(3):
        F[..., MX + m, m] += p
    F[..., ENERGY, :] = (U[..., ENERGY] + p)[..., None] * v
    return F


def normal_flux(U: np.ndarray, n: np.ndarray, gas: GasModel, *, checked: bool = True) -> np.ndarray:
    """F(U) . n for unit normals broadcast against U's batch axes."""
    U = np.asarray(U, dtype=float)
    n = np.asarray(n, dtype=float)
    if checked:
        check_admissible(U, gas, where="flux argument")
    p = pressure_unchecked(U, gas)
    m = U[..., MX:ENERGY]
    vn = np.einsum("...i,...i->...", m, n) / U[..., RHO]
    out = np.empty(np.broadcast_shapes(U.shape, n.shape[:-1] + (N_CONSERVED,)))
    out[..., RHO] = U[..., RHO] * vn
    out[..., MX:ENERGY] = m * vn[..., None] + p[..., None] * n
    out[..., ENERGY] = (U[..., ENERGY] + p) * vn
    return out


def max_wavespeed(U: np.ndarray, gas: GasModel, n: Optional[np.ndarray] = None, *, checked: bool = True) -> np.ndarray:
    """|v . n| + c, or |v| + c (the bound over all directions) when n is None."""
    U = np.asarray(U, dtype=float)
    if checked:
        check_admissible(U, gas, where="wave speed argument")
    c = np.sqrt(gas.gamma * pressure_unchecked(U, gas) / U[..., RHO])
    v = U[..., MX:ENERGY] / U[..., RHO, None]
    if n is None:
        return np.linalg.norm(v, axis=-1) + c
    return np.abs(np.einsum("...i,...i->...", v, np.asarray(n, dtype=float))) + c


def primitive_to_conserved(rho, velocity_, p, gas: GasModel) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(velocity_, dtype=float)
    p = np.asarray(p, dtype=float)
    U = np.empty(np.broadcast_shapes(rho.shape, v.shape[:-1], p.shape) + (N_CONSERVED,))
    U[..., RHO] = rho
    U[..., MX:ENERGY] = rho[..., None] * v
    U[..., ENERGY] = p / (gas.gamma - 1.0) + 0.5 * rho * np.einsum("...i,...i->...", v, v)
    return U


def freestream_state(mach: float, alpha_deg: float, rho: float, p: float, gas: GasModel) -> np.ndarray:
    """Uniform state with |v| = M sqrt(gamma p / rho) pitched by alpha in the x-z plane."""
    if mach < 0 or rho <= 0 or p <= 0:
        raise ConfigError(
            msg="freestream needs mach >= 0, density > 0 and pressure > 0",
            context={"mach": mach, "density": rho, "pressure": p},
        )
    speed = mach * math.sqrt(gas.gamma * p / rho)
    a = math.radians(alpha_deg)
    return primitive_to_conserved(rho, (speed * math.cos(a), 0.0, speed * math.sin(a)), p, gas)
