# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..core.exceptions import ConfigError, NumericsError
from ..euler.state import GasModel, max_wavespeed


def element_wavespeeds(values: np.ndarray, gas: GasModel) -> np.ndarray:
    """max over nodes of |v| + c for nodal values (K, 5, Np)."""
    return max_wavespeed(np.asarray(values).transpose(0, 2, 1), gas).max(axis=1)


def compute_timestep(
    values: np.ndarray,
    h: np.ndarray,
    gas: GasModel,
    p: int,
    cfl: float,
    *,
    eps_max: float = 0.0,
) -> float:
    """
    dt = CFL min_k h_k / (lambda_k (p+1)^2), and with viscosity also
    dt <= CFL min_k h_k^2 / (eps_max (p+1)^4).
    """
    if not (math.isfinite(cfl) and cfl > 0.0):
        raise ConfigError(msg=f"CFL number must be > 0, got {cfl}")
    h = np.asarray(h, dtype=float)
    if h.size == 0 or np.any(~(h > 0.0)):
        raise NumericsError(msg="element sizes must be positive", context={"min_h": float(h.min()) if h.size else None})
    lam = element_wavespeeds(values, gas)
    if np.any(~(lam > 0.0)):
        raise NumericsError(msg="wave speeds must be positive", context={"min_speed": float(lam.min())})
    scale = float(p + 1) ** 2
    dt = cfl * float(np.min(h / (lam * scale)))
    if eps_max > 0.0:
        dt = min(dt, cfl * float(np.min(h)) ** 2 / (eps_max * scale * scale))
    return dt


def fixed_timestep(dt: Optional[float]) -> Optional[float]:
    if dt is None:
        return None
    if not (math.isfinite(dt) and dt > 0.0):
        raise ConfigError(msg=f"fixed time step must be > 0, got {dt}")
    return float(dt)
