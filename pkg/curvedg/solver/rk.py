# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..core.exceptions import ConfigError

RhsFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class RKScheme:
    """Two-register (2N) Runge-Kutta scheme: res = a_i res + dt f(u); u += b_i res."""

    name: str
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.a) == len(self.b) == len(self.c)) or not self.a:
            raise ConfigError(msg=f"RK scheme {self.name!r} needs equal-length a, b, c")
        if self.a[0] != 0.0:
            raise ConfigError(msg=f"RK scheme {self.name!r} must start with a_1 = 0")

    @property
    def stages(self) -> int:
        return len(self.a)


# Carpenter & Kennedy, five stages, fourth order
LSRK54 = RKScheme(
    name="lsrk54",
    a=(
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ),
    b=(
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ),
    c=(
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363183890.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ),
)

FORWARD_EULER = RKScheme(name="euler", a=(0.0,), b=(1.0,), c=(0.0,))


def rk_step(u: np.ndarray, rhs: RhsFn, dt: float, scheme: RKScheme = LSRK54, t: float = 0.0) -> np.ndarray:
    """One step; returns the advanced state and leaves `u` untouched."""
    if not dt > 0.0:
        raise ConfigError(msg=f"time step must be > 0, got {dt}")
    u = np.array(u, dtype=float)
    res = np.zeros_like(u)
    for a, b, c in zip(scheme.a, scheme.b, scheme.c):
        res *= a
        res += dt * rhs(u, t + c * dt)
        u += b * res
    return u
