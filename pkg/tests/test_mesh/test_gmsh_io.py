# SPDX-License-Identifier: LGPL-3.0-or-later
import io

import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError, MeshError
from curvedg.mesh import parse_gmsh, read_gmsh, save_gmsh, write_gmsh
from fixtures.meshes import CUBE_MSH, REFERENCE_TET_MSH, TWO_TETS_MSH, octant_shell, parse_text


def test_reference_tet():
    mesh = parse_text(REFERENCE_TET_MSH)
    assert mesh.n_elements == 1
    assert len(mesh.boundary_faces) == 4
    assert mesh.tags == ("wall",)
    assert mesh.face_links == ()
    assert mesh.total_volume() == pytest.approx(4.0 / 3.0, abs=1e-14)


def test_two_tets():
    mesh = parse_text(TWO_TETS_MSH)
    assert mesh.n_elements == 2
    assert len(mesh.face_links) == 1
    assert len(mesh.boundary_faces) == 6
    assert np.all(mesh.volumes() > 0)
    assert mesh.tags == ("boundary",)


def test_cube_counts_and_tags():
    mesh = parse_text(CUBE_MSH)
    assert mesh.n_vertices == 8
    assert mesh.n_elements == 6
    assert len(mesh.boundary_faces) == 12
    assert mesh.total_volume() == pytest.approx(1.0, abs=1e-10)
    assert set(mesh.tags) == {"bottom", "tag7", "boundary"}
    assert len(mesh.faces_with_tag("bottom")) == 2
    assert len(mesh.faces_with_tag("tag7")) == 1


def test_cube_boundary_count_matches_face_counting():
    mesh = parse_text(CUBE_MSH)
    counts = {}
    for tet in mesh.tets.tolist():
        for face in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
            key = tuple(sorted(tet[i] for i in face))
            counts[key] = counts.get(key, 0) + 1
    assert sum(1 for c in counts.values() if c == 1) == len(mesh.boundary_faces)
    assert sum(1 for c in counts.values() if c == 2) == len(mesh.face_links)


def test_rewrite_reproduces_connectivity():
    mesh = octant_shell(4)
    buf = io.StringIO()
    write_gmsh(mesh, buf)
    again = parse_gmsh(io.StringIO(buf.getvalue()))
    assert np.array_equal(again.tets, mesh.tets)
    assert np.array_equal(again.vertices, mesh.vertices)
    assert again.face_links == mesh.face_links
    assert again.boundary_faces == mesh.boundary_faces
    assert again.checksum() == mesh.checksum()


def test_save_and_read(tmp_path):
    mesh = parse_text(CUBE_MSH)
    out = save_gmsh(mesh, tmp_path / "cube.msh")
    assert read_gmsh(out).checksum() == mesh.checksum()
    assert not (tmp_path / "cube.msh.tmp").exists()


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        read_gmsh(tmp_path / "absent.msh")


@pytest.mark.parametrize(
    "bad, line",
    [
        (TWO_TETS_MSH.replace("2 4 0 2 3 4 5", "2 5 0 2 3 4 5 6 7 8 9"), 15),
        (TWO_TETS_MSH.replace("2 4 0 2 3 4 5", "2 4 0 2 3 4 42"), 15),
        (TWO_TETS_MSH.replace("$EndNodes", "$EndNode"), 11),
        (TWO_TETS_MSH.replace("1 0 0 0", "1 0 zero 0"), 6),
    ],
)
def test_parse_errors_carry_line_numbers(bad, line):
    with pytest.raises(MeshError) as ei:
        parse_text(bad)
    assert ei.value.context["line"] == line


def test_nonconforming_face_rejected():
    text = TWO_TETS_MSH.replace("5 1 1 1", "5 1 1 1\n6 -1 -1 -1").replace("$Nodes\n5", "$Nodes\n6")
    text = text.replace("$Elements\n2", "$Elements\n3").replace(
        "2 4 0 2 3 4 5\n", "2 4 0 2 3 4 5\n3 4 0 2 3 4 6\n"
    )
    with pytest.raises(MeshError):
        parse_text(text)


def test_negative_tets_are_reoriented():
    text = TWO_TETS_MSH.replace("1 4 0 1 2 3 4", "1 4 0 1 3 2 4")
    mesh = parse_text(text)
    assert np.all(mesh.volumes() > 0)
