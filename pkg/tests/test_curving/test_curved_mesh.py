# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import CurvingError, FormatError
from curvedg.curving import (
    CurvedMesh,
    ElasticMaterial,
    check_curved_jacobians,
    curve_mesh,
    read_sidecar,
    solve_elasticity,
    write_sidecar,
)
from curvedg.curving.sidecar import decode_sidecar, encode_sidecar
from curvedg.mesh import extract_submesh
from curvedg.operators.geometry import compute_mapping
from curvedg.refelem import reference_element
from fixtures.curved import SHELL_BOX, curved_shell
from fixtures.meshes import SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS, all_surface_box, octant_shell


def test_zero_field_keeps_straight_nodes():
    mesh = octant_shell(6)
    sub = extract_submesh(mesh, *SHELL_BOX, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)
    field = solve_elasticity(sub, ElasticMaterial(), lambda x: np.zeros_like(x), 2)
    curved = curve_mesh(mesh, field, 2)
    straight = CurvedMesh.straight(mesh, 2).all_nodes()
    assert curved.n_curved == sub.n_elements
    assert np.abs(curved.all_nodes() - straight).max() < 1e-14


def test_sphere_surface_nodes_on_sphere():
    mesh, sub, _, curved = curved_shell(2)
    ref = reference_element(2)
    for e, f in sub.faces_d1.tolist():
        k = int(sub.elements[e])
        nodes = curved.element_nodes(k)[ref.colloc_face_ids[f]]
        assert np.abs(np.linalg.norm(nodes, axis=1) - 1.0).max() < 1e-6


def test_curved_jacobians_positive():
    _, _, _, curved = curved_shell(2)
    report = check_curved_jacobians(curved)
    assert len(report) == curved.n_curved
    assert min(report.values()) > 0.0


def test_elements_outside_submesh_stay_straight():
    mesh, sub, _, curved = curved_shell(2)
    inside = set(sub.elements.tolist())
    outside = [k for k in range(mesh.n_elements) if k not in inside]
    assert outside
    assert not any(curved.is_curved(k) for k in outside)


def test_affine_field_keeps_elements_affine():
    mesh = all_surface_box(2)
    sub = extract_submesh(mesh, (-1, -1, -1), (2, 2, 2), "surface")
    A = np.array([[0.05, 0.01, 0.0], [0.0, -0.03, 0.02], [0.01, 0.0, 0.04]])
    field = solve_elasticity(sub, ElasticMaterial(1.0, 0.3), lambda x: x @ A.T + 0.1, 3)
    curved = curve_mesh(mesh, field, 3)
    geo = compute_mapping(curved.all_nodes(), reference_element(3))
    spread = np.abs(geo.jac - geo.jac[:, :1]).max(axis=1) / geo.jac[:, 0]
    assert spread.max() < 1e-10


def test_inverted_curved_element_reported():
    mesh = all_surface_box(1)
    base = CurvedMesh.straight(mesh, 1)
    nodes = base.element_nodes(0)[[1, 0, 2, 3]]
    bad = CurvedMesh(mesh=mesh, degree=1, curved={0: nodes})
    with pytest.raises(CurvingError) as ei:
        check_curved_jacobians(bad)
    assert ei.value.context["elements"] == [0]


def test_lower_degree_view_interpolates():
    _, _, _, curved = curved_shell(2)
    low = curved.nodes_at_degree(1)
    assert low.degree == 1
    k = next(iter(curved.curved))
    # vertex nodes of the p=1 view coincide with the p=2 vertex nodes
    ref2 = reference_element(2)
    ref1 = reference_element(1)
    M = ref2.interpolation_matrix(ref1.colloc_nodes)
    assert np.allclose(low.element_nodes(k), M @ curved.element_nodes(k), atol=1e-14)
    assert curved.nodes_at_degree(2) is curved


def test_sidecar_roundtrip_is_byte_identical(tmp_path):
    mesh, _, _, curved = curved_shell(2)
    path = write_sidecar(curved, tmp_path / "shell.cdg")
    first = path.read_bytes()
    assert first[:4] == b"CDG1"
    back = read_sidecar(path, mesh)
    assert back.degree == 2 and back.n_curved == curved.n_curved
    assert encode_sidecar(back) == first


def test_sidecar_rejects_corruption_and_wrong_mesh(tmp_path):
    _, _, _, curved = curved_shell(2)
    data = bytearray(encode_sidecar(curved))
    data[40] ^= 0xFF
    with pytest.raises(FormatError):
        decode_sidecar(bytes(data))
    path = write_sidecar(curved, tmp_path / "shell.cdg")
    with pytest.raises(FormatError):
        read_sidecar(path, all_surface_box(1))


def test_empty_sidecar_header_fields():
    mesh = all_surface_box(1)
    degree, n_elem, curved = decode_sidecar(encode_sidecar(CurvedMesh.straight(mesh, 3)))
    assert (degree, n_elem, curved) == (3, 6, {})
