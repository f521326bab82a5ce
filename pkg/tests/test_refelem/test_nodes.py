# SPDX-License-Identifier: LGPL-3.0-or-later
from itertools import combinations, permutations

import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError
from curvedg.refelem import build_colloc_nodes, equidistant_nodes, vandermonde
from curvedg.refelem.basis import barycentric
from curvedg.refelem.nodes import gauss_lobatto
from fixtures.sampling import REF_VERTICES


def _lebesgue(p, nodes, sample):
    L = vandermonde(p, sample) @ np.linalg.inv(vandermonde(p, nodes))
    return np.max(np.sum(np.abs(L), axis=1))


def _dense_sample(n=24):
    return equidistant_nodes(n)


def test_p1_nodes_are_vertices():
    assert np.allclose(build_colloc_nodes(1), REF_VERTICES, atol=1e-14)


def test_counts_and_edge_midpoints():
    assert build_colloc_nodes(4).shape == (35, 3)
    nodes = build_colloc_nodes(2)
    assert nodes.shape == (10, 3)
    midpoint = 0.5 * (REF_VERTICES[0] + REF_VERTICES[1])
    assert np.min(np.linalg.norm(nodes - midpoint, axis=1)) < 1e-12


@pytest.mark.parametrize("p", range(1, 10))
def test_nodes_inside_closed_tet(p):
    lam = barycentric(build_colloc_nodes(p))
    assert lam.min() > -1e-12
    assert lam.max() < 1.0 + 1e-12


@pytest.mark.parametrize("p", range(1, 10))
def test_edge_nodes_are_gauss_lobatto_points(p):
    lam = barycentric(build_colloc_nodes(p))
    for a, b in combinations(range(4), 2):
        rest = [k for k in range(4) if k not in (a, b)]
        on_edge = np.all(np.abs(lam[:, rest]) < 1e-10, axis=1)
        assert on_edge.sum() == p + 1
        along = np.sort(lam[on_edge, b] - lam[on_edge, a])
        assert np.allclose(along, gauss_lobatto(p), atol=1e-10)


def test_nodes_symmetric_under_vertex_permutations():
    lam = barycentric(build_colloc_nodes(5))
    for perm in permutations(range(4)):
        moved = lam[:, list(perm)]
        dist = np.linalg.norm(moved[:, None, :] - lam[None, :, :], axis=2)
        assert np.max(np.min(dist, axis=1)) < 1e-12


def test_lebesgue_constant_not_worse_than_equidistant():
    sample = _dense_sample()
    p = 2
    assert _lebesgue(p, build_colloc_nodes(p), sample) <= _lebesgue(p, equidistant_nodes(p), sample) + 1e-12
    p = 6
    assert _lebesgue(p, build_colloc_nodes(p), sample) < _lebesgue(p, equidistant_nodes(p), sample)


@pytest.mark.parametrize("p", [0, 10])
def test_unsupported_degree_rejected(p):
    with pytest.raises(ConfigError):
        build_colloc_nodes(p)
