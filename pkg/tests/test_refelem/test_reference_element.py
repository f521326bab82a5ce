# SPDX-License-Identifier: LGPL-3.0-or-later
import io

import numpy as np
import pytest

from curvedg.core.exceptions import FormatError
from curvedg.refelem import FACE_VERTEX_IDS, reference_element
from curvedg.refelem.tables import dump_tables, format_tables, load_tables, parse_tables
from fixtures.sampling import REF_VERTICES, random_tet_points


def test_counts_at_degree_four():
    ref = reference_element(4)
    assert ref.n_basis == 35
    assert ref.n_cub == 70
    assert ref.face_nodes.shape == (4, 16, 3)
    assert ref.n_cub > ref.n_basis


def test_vandermonde_inverse_identity():
    ref = reference_element(3)
    assert np.max(np.abs(ref.vandermonde @ ref.inv_vandermonde - np.eye(ref.n_basis))) < 1e-12
    assert np.isfinite(ref.condition_number)


def test_p1_vandermonde_constant_mode():
    ref = reference_element(1)
    coeffs = np.zeros(4)
    coeffs[0] = 1.0
    vals = ref.vandermonde @ coeffs
    assert np.allclose(vals, vals[0], atol=1e-15)


def test_derivative_of_r_squared_at_cubature():
    ref = reference_element(2)
    r = ref.colloc_nodes[:, 0]
    dr = ref.deriv_cub[0] @ (r**2)
    assert np.max(np.abs(dr - 2.0 * ref.cub_nodes[:, 0])) < 1e-12


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_interpolation_reproduces_polynomials(p):
    ref = reference_element(p)
    rng = np.random.default_rng(p)
    coef = rng.normal(size=(p + 1, p + 1, p + 1))

    def f(x):
        out = np.zeros(len(x))
        for a in range(p + 1):
            for b in range(p + 1 - a):
                for c in range(p + 1 - a - b):
                    out += coef[a, b, c] * x[:, 0] ** a * x[:, 1] ** b * x[:, 2] ** c
        return out

    pts = random_tet_points(200, seed=p)
    approx = ref.interpolation_matrix(pts) @ f(ref.colloc_nodes)
    assert np.max(np.abs(approx - f(pts))) < 1e-10
    assert np.max(np.abs(ref.interp_cub @ f(ref.colloc_nodes) - f(ref.cub_nodes))) < 1e-10
    faces = ref.face_nodes.reshape(-1, 3)
    assert np.max(np.abs(ref.interp_face @ f(ref.colloc_nodes) - f(faces))) < 1e-10


def test_slanted_face_area():
    ref = reference_element(3)
    assert ref.face_area(2) == pytest.approx(2.0 * np.sqrt(3.0), abs=1e-13)
    assert ref.face_area(0) == pytest.approx(2.0, abs=1e-13)


def test_face_nodes_lie_on_their_faces():
    ref = reference_element(3)
    for f, ids in enumerate(FACE_VERTEX_IDS):
        a, b, c = REF_VERTICES[list(ids)]
        normal = np.cross(b - a, c - a)
        assert np.max(np.abs((ref.face_nodes[f] - a) @ normal)) < 1e-12


def test_face_node_maps_are_permutations():
    ref = reference_element(4)
    for sigma, idx in ref.face_node_maps.items():
        assert sorted(idx.tolist()) == list(range(ref.n_face))
        assert np.allclose(ref.face_bary[idx], ref.face_bary[:, list(sigma)], atol=1e-12)


def test_colloc_face_ids_count():
    ref = reference_element(3)
    for ids in ref.colloc_face_ids:
        assert len(ids) == (3 + 1) * (3 + 2) // 2


def test_tables_dump_parses_back(tmp_path):
    ref = reference_element(2)
    assert format_tables(ref).startswith("CURVEDG-REFELEM 1\ndegree 2\n")
    tables = load_tables(dump_tables(ref, tmp_path / "p2.txt"))
    assert int(tables["degree"][0, 0]) == 2
    assert np.array_equal(tables["vandermonde"], ref.vandermonde)
    assert tables["face_nodes"].shape == (4 * ref.n_face, 3)


def test_tables_rejects_foreign_text():
    with pytest.raises(FormatError):
        parse_tables(io.StringIO("NURBS 1\n"))
    with pytest.raises(FormatError):
        parse_tables(io.StringIO("CURVEDG-REFELEM 2\ndegree 1\n"))
    with pytest.raises(FormatError):
        parse_tables(io.StringIO("CURVEDG-REFELEM 1\ndegree 1\n[vandermonde 2 2]\n1 0 0\n0 1 0\n"))


def test_reference_element_is_read_only():
    ref = reference_element(2)
    with pytest.raises(ValueError):
        ref.interp_cub[0, 0] = 1.0
