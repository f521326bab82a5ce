# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Element-wise artificial viscosity: modal-decay smoothness indicator,
sine ramp for the viscosity amount, and the first-order (BR1) flux pieces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.exceptions import ConfigError
from ..refelem.basis import n_basis
from ..refelem.reference_element import ReferenceElement
from .state import FIELD_NAMES


@dataclass(frozen=True)
class ViscosityModel:
    eps0: float = 0.3
    kappa: float = 4.0
    s0_offset: float = 0.0
    component: int = 0
    weighted_indicator: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.eps0) and self.eps0 >= 0.0):
            raise ConfigError(msg=f"viscosity eps0 must be >= 0, got {self.eps0}")
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise ConfigError(msg=f"viscosity kappa must be > 0, got {self.kappa}")
        if not 0 <= int(self.component) < len(FIELD_NAMES):
            raise ConfigError(msg=f"indicator component must be in 0..4, got {self.component}")

    @property
    def active(self) -> bool:
        return self.eps0 > 0.0

    def s0(self, p: int) -> float:
        return math.log10(1.0 / float(p) ** 4) + self.s0_offset


def smoothness_indicator(u: np.ndarray, ref: ReferenceElement, jw: Optional[np.ndarray] = None) -> np.ndarray:
    """
    S_k = energy of the top-degree modes / total energy for nodal values u (K, Np).

    Without `jw` the integrals are evaluated on the reference element through
    Parseval's identity for the orthonormal basis. With `jw` (K, N_cub) holding
    J * w at the cubature nodes the physical integrals are used instead.
    A field that is identically zero has S_k = 0.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    modal = u @ ref.inv_vandermonde.T
    low = n_basis(ref.degree - 1)
    if jw is None:
        top = np.einsum("kj,kj->k", modal[:, low:], modal[:, low:])
        total = np.einsum("kj,kj->k", modal, modal)
    else:
        full = modal @ ref.cub_vandermonde.T
        diff = modal[:, low:] @ ref.cub_vandermonde[:, low:].T
        top = np.einsum("kq,kq->k", jw, diff * diff)
        total = np.einsum("kq,kq->k", jw, full * full)
    out = np.zeros_like(total)
    np.divide(top, total, out=out, where=total > 0.0)
    return out


def viscosity_amount(S: np.ndarray, p: int, model: ViscosityModel) -> np.ndarray:
    """Sine ramp of log10(S_k) around s0 with half-width kappa, bounded in [0, eps0]."""
    S = np.asarray(S, dtype=float)
    if np.any(S < 0):
        raise ConfigError(msg="smoothness indicator must be non-negative")
    s = np.full(S.shape, -np.inf)
    np.log10(S, out=s, where=S > 0)
    return viscosity_from_log(s, p, model)


def viscosity_from_log(s: np.ndarray, p: int, model: ViscosityModel) -> np.ndarray:
    """The ramp as a function of s_k = log10 S_k; -inf maps to zero."""
    s = np.asarray(s, dtype=float)
    s0, kappa, eps0 = model.s0(p), model.kappa, model.eps0
    with np.errstate(invalid="ignore"):
        ramp = 0.5 * eps0 * (1.0 + np.sin(np.pi * (s - s0) / (2.0 * kappa)))
    eps = np.where(s < s0 - kappa, 0.0, np.where(s > s0 + kappa, eps0, ramp))
    return np.clip(eps, 0.0, eps0)


def element_viscosity(
    values: np.ndarray,
    ref: ReferenceElement,
    model: ViscosityModel,
    jw: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Per-element eps_k from conserved nodal values (K, 5, Np)."""
    comp = np.asarray(values)[:, model.component, :]
    S = smoothness_indicator(comp, ref, jw if model.weighted_indicator else None)
    return viscosity_amount(S, ref.degree, model)


def aux_flux(U: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """sqrt(eps_k) U for element-batched U (K, ...)."""
    eps = _check_eps(eps)
    root = np.sqrt(eps).reshape(eps.shape + (1,) * (np.ndim(U) - 1))
    return root * U


def grad_flux(q: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """sqrt(eps_k) q for the auxiliary gradient; q carries the extra spatial axis."""
    return aux_flux(q, eps)


def central_trace(inner: np.ndarray, outer: np.ndarray) -> np.ndarray:
    return 0.5 * (inner + outer)


def _check_eps(eps: np.ndarray) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise ConfigError(msg="artificial viscosity must be non-negative", context={"min_eps": float(eps.min())})
    return eps
