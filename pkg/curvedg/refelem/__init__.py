# SPDX-License-Identifier: LGPL-3.0-or-later
from .basis import grad_vandermonde, modal_basis_eval, modal_basis_grad, n_basis, vandermonde
from .nodes import build_colloc_nodes, equidistant_nodes
from .quadrature import build_cubature, build_face_quadrature, collapsed_tet_rule, collapsed_tri_rule, triangle_rule
from .reference_element import FACE_VERTEX_IDS, ReferenceElement, reference_element

__all__ = [
    "FACE_VERTEX_IDS",
    "ReferenceElement",
    "build_colloc_nodes",
    "build_cubature",
    "build_face_quadrature",
    "collapsed_tet_rule",
    "collapsed_tri_rule",
    "equidistant_nodes",
    "grad_vandermonde",
    "modal_basis_eval",
    "modal_basis_grad",
    "n_basis",
    "reference_element",
    "triangle_rule",
    "vandermonde",
]
