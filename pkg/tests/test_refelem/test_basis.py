# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import DomainError
from curvedg.refelem import collapsed_tet_rule, modal_basis_eval, modal_basis_grad, n_basis
from curvedg.refelem.basis import mode_indices
from fixtures.sampling import random_tet_points


def test_basis_counts():
    assert n_basis(0) == 1
    assert n_basis(1) == 4
    assert n_basis(4) == 35
    assert len(mode_indices(4)) == 35


def test_constant_mode_value_and_norm():
    pts = random_tet_points(10, seed=1)
    v = modal_basis_eval(0, pts)
    assert v.shape == (10, 1)
    assert np.allclose(v, np.sqrt(3.0 / 4.0), atol=1e-14)

    nodes, w = collapsed_tet_rule(20)
    psi0 = modal_basis_eval(0, nodes)[:, 0]
    assert np.sum(w * psi0**2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_orthonormal_under_dense_rule(p):
    nodes, w = collapsed_tet_rule(2 * p + 2)
    V = modal_basis_eval(p, nodes)
    gram = V.T @ (w[:, None] * V)
    assert np.max(np.abs(gram - np.eye(V.shape[1]))) < 1e-10


def test_hierarchy_on_random_points():
    pts = random_tet_points(1000, seed=2)
    for p in range(1, 6):
        hi = modal_basis_eval(p, pts)
        lo = modal_basis_eval(p - 1, pts)
        assert np.max(np.abs(hi[:, : lo.shape[1]] - lo)) < 1e-12


def test_gradient_matches_finite_differences():
    pts = random_tet_points(50, seed=3, shrink=0.8)
    h = 1e-6
    grad = modal_basis_grad(3, pts)
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        fd = (modal_basis_eval(3, pts + e) - modal_basis_eval(3, pts - e)) / (2 * h)
        assert np.max(np.abs(grad[axis] - fd)) < 1e-6


def test_point_outside_tet_is_domain_error():
    with pytest.raises(DomainError):
        modal_basis_eval(2, np.array([[0.5, 0.5, 0.5]]))
