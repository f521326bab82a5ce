# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import NumericsError
from curvedg.curving.deformation import affine_image
from curvedg.operators import compute_mapping
from curvedg.refelem import reference_element
from fixtures.curved import curved_shell
from fixtures.meshes import octant_shell


def test_reference_tet_is_identity_map():
    ref = reference_element(3)
    geo = compute_mapping(ref.colloc_nodes, ref)
    assert np.abs(geo.jac - 1.0).max() < 1e-12
    assert np.abs(geo.rx - np.eye(3)).max() < 1e-11
    assert geo.is_affine().all()
    assert np.abs(geo.face_jac[0, :, 0] - np.array([1.0, 1.0, np.sqrt(3.0), 1.0])).max() < 1e-12


def test_reference_tet_normals():
    ref = reference_element(2)
    geo = compute_mapping(ref.colloc_nodes, ref)
    expected = np.array([[0, 0, -1], [0, -1, 0], [1, 1, 1], [-1, 0, 0]], dtype=float)
    expected /= np.linalg.norm(expected, axis=1, keepdims=True)
    for f in range(4):
        assert np.abs(geo.normals[0, f] - expected[f]).max() < 1e-12


def test_scaled_tet_determinants():
    ref = reference_element(2)
    geo = compute_mapping(2.0 * ref.colloc_nodes, ref)
    assert np.abs(geo.jac - 8.0).max() < 1e-11
    assert np.abs(geo.dpsi_det - 0.125).max() < 1e-13


def test_input_array_is_not_frozen():
    ref = reference_element(1)
    nodes = np.array(ref.colloc_nodes)
    compute_mapping(nodes, ref)
    nodes[0, 0] = 0.0


def test_inverted_element_raises():
    ref = reference_element(2)
    mesh = octant_shell(3)
    nodes = affine_image(mesh.vertices, mesh.tets, ref.colloc_nodes)
    nodes[5] = nodes[5][:, [1, 0, 2]]
    with pytest.raises(NumericsError) as ei:
        compute_mapping(nodes, ref)
    assert ei.value.context["elements"] == [5]
    assert ei.value.context["min_jacobian"] < 0


def test_straight_normals_point_outward():
    ref = reference_element(2)
    mesh = octant_shell(3)
    geo = compute_mapping(affine_image(mesh.vertices, mesh.tets, ref.colloc_nodes), ref)
    centroids = mesh.vertices[mesh.tets].mean(axis=1)
    face_x = affine_image(mesh.vertices, mesh.tets, ref.face_nodes.reshape(-1, 3)).reshape(mesh.n_elements, 4, -1, 3)
    outward = np.einsum("kfgm,kfgm->kfg", geo.normals, face_x - centroids[:, None, None, :])
    assert outward.min() > 0


def test_curved_shell_geometry():
    _, _, _, curved = curved_shell(2)
    ref = reference_element(2)
    geo = compute_mapping(curved.all_nodes(), ref)
    assert geo.jac.min() > 0
    assert np.abs(np.linalg.norm(geo.normals, axis=-1) - 1.0).max() < 1e-12
    curved_ids = np.array(list(curved.curved.keys()))
    assert not geo.is_affine()[curved_ids].all()


def test_curved_shell_neighbour_normals_are_opposite():
    mesh, _, _, curved = curved_shell(2)
    ref = reference_element(2)
    geo = compute_mapping(curved.all_nodes(), ref)
    worst = 0.0
    for link in mesh.face_links:
        idx = ref.face_node_maps[link.perm]
        ours = geo.normals[link.element, link.face]
        theirs = geo.normals[link.neighbor, link.neighbor_face][idx]
        worst = max(worst, float(np.abs(ours + theirs).max()))
    assert worst < 1e-8
