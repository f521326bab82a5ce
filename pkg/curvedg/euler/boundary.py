# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

from enum import Enum
from typing import Mapping, Optional

import numpy as np

from ..core.exceptions import ConfigError
from .state import ENERGY, MX


class BoundaryKind(str, Enum):
    SLIP_WALL = "slip_wall"
    FARFIELD = "farfield"
    SYMMETRY = "symmetry"

    @classmethod
    def parse(cls, value: object) -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ConfigError(
            msg=f"unknown boundary kind {value!r}",
            context={"choices": [k.value for k in cls]},
        )


def parse_boundary_map(raw: Optional[Mapping[str, object]]) -> dict:
    """tag -> BoundaryKind from a config mapping of tag -> kind name."""
    return {str(tag): BoundaryKind.parse(kind) for tag, kind in (raw or {}).items()}


def boundary_state(U: np.ndarray, n: np.ndarray, kind: object, freestream: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Ghost state for boundary faces.

    slip_wall, symmetry: mirror the normal momentum, keep rho and rho E.
    farfield: the freestream state; the Riemann solver sorts out in- and outflow.
    """
    kind = BoundaryKind.parse(kind)
    U = np.asarray(U, dtype=float)
    if kind is BoundaryKind.FARFIELD:
        if freestream is None:
            raise ConfigError(msg="farfield boundary needs a freestream state")
        return np.broadcast_to(np.asarray(freestream, dtype=float), U.shape).copy()
    n = np.asarray(n, dtype=float)
    ghost = np.array(U)
    m = U[..., MX:ENERGY]
    mn = np.einsum("...i,...i->...", m, n)
    ghost[..., MX:ENERGY] = m - 2.0 * mn[..., None] * n
    return ghost
