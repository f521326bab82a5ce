# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError
from curvedg.mesh import extract_submesh
from fixtures.meshes import SHELL_FAR_TAG, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS, octant_shell


@pytest.fixture(scope="module")
def shell():
    return octant_shell(6)


def _face_set(rows):
    return {tuple(r) for r in np.asarray(rows).tolist()}


def test_selection_matches_vertex_scan(shell):
    lo, hi = (-0.1, -0.1, -0.1), (1.6, 1.6, 1.6)
    sub = extract_submesh(shell, lo, hi, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)
    expected = []
    for k, tet in enumerate(shell.tets):
        pts = shell.vertices[tet]
        if any(all(lo[i] < p[i] < hi[i] for i in range(3)) for p in pts):
            expected.append(k)
    assert sub.elements.tolist() == expected
    assert len(sub.faces_d1) == len(shell.faces_with_tag(SHELL_SURFACE_TAG))


def test_face_classes_cover_and_are_disjoint(shell):
    sub = extract_submesh(shell, (-0.1,) * 3, (1.6,) * 3, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)
    d1, d2, nn = _face_set(sub.faces_d1), _face_set(sub.faces_d2), _face_set(sub.faces_n)
    assert not (d1 & d2) and not (d1 & nn) and not (d2 & nn)
    emap = sub.element_map()
    boundary = set()
    for i, k in enumerate(sub.elements.tolist()):
        for f in range(4):
            nb = shell.connectivity.neighbor[k, f]
            if nb < 0 or emap[nb] < 0:
                boundary.add((i, f))
    assert d1 | d2 | nn == boundary
    assert len(nn) > 0 and len(d2) > 0


def test_box_around_everything(shell):
    sub = extract_submesh(shell, (-1.0,) * 3, (4.0,) * 3, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)
    assert sub.n_elements == shell.n_elements
    assert len(sub.faces_d2) == len(shell.faces_with_tag(SHELL_FAR_TAG))
    assert np.array_equal(sub.vertex_ids, np.arange(shell.n_vertices))


def test_box_missing_mesh(shell):
    with pytest.raises(ConfigError):
        extract_submesh(shell, (10.0,) * 3, (11.0,) * 3, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)


def test_unknown_surface_tag(shell):
    with pytest.raises(ConfigError):
        extract_submesh(shell, (-1.0,) * 3, (4.0,) * 3, "wing")


def test_untagged_symmetry_faces_become_d2(shell):
    sub = extract_submesh(shell, (-0.1,) * 3, (1.6,) * 3, SHELL_SURFACE_TAG, ())
    assert len(sub.faces_n) == 0
    with_sym = extract_submesh(shell, (-0.1,) * 3, (1.6,) * 3, SHELL_SURFACE_TAG, SHELL_SYMMETRY_TAGS)
    assert len(sub.faces_d2) == len(with_sym.faces_d2) + len(with_sym.faces_n)
