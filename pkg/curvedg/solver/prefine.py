# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import numpy as np

from ..core.exceptions import ConfigError
from ..refelem.reference_element import ReferenceElement


def modal_coefficients(values: np.ndarray, ref: ReferenceElement) -> np.ndarray:
    """Nodal (..., Np) -> modal coefficients of the orthonormal hierarchical basis."""
    return np.asarray(values, dtype=float) @ ref.inv_vandermonde.T


def embed_modal(modal: np.ndarray, n_target: int) -> np.ndarray:
    """Zero-extend modal coefficients along the last axis."""
    modal = np.asarray(modal, dtype=float)
    out = np.zeros(modal.shape[:-1] + (int(n_target),))
    out[..., : modal.shape[-1]] = modal
    return out


def p_refine_embed(values: np.ndarray, ref_from: ReferenceElement, ref_to: ReferenceElement) -> np.ndarray:
    """
    Nodal values at degree p1 to nodal values at degree p2 >= p1 representing
    the same polynomial: higher modes start at zero.
    """
    if ref_to.degree < ref_from.degree:
        raise ConfigError(
            msg=f"p-refinement must not lower the degree ({ref_from.degree} -> {ref_to.degree})",
            context={"from": ref_from.degree, "to": ref_to.degree},
        )
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != ref_from.n_basis:
        raise ConfigError(msg="values do not match the source degree", context={"n": values.shape[-1], "Np": ref_from.n_basis})
    if ref_to.degree == ref_from.degree:
        return values.copy()
    modal = embed_modal(modal_coefficients(values, ref_from), ref_to.n_basis)
    return modal @ ref_to.vandermonde.T
