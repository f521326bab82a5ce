# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Gmsh MSH 2.2 ASCII reader and writer.

Only tetrahedra (type 4) and boundary triangles (type 2) are meaningful; points
and lines (types 15, 1) are skipped, everything else is rejected. Boundary tags
come from $PhysicalNames, or "tag<N>" when a physical id has no name.
"""
from __future__ import annotations

import logging
import shlex
from pathlib import Path
from typing import Dict, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from ..core.exceptions import ConfigError, MeshError
from ..core.utils import U
from .mesh import FaceKey, Mesh, face_key

_LOG = logging.getLogger("curvedg.mesh.gmsh")

GMSH_TET = 4
GMSH_TRIANGLE = 2
GMSH_SKIPPED = {1, 15}
_NODES_PER_TYPE = {1: 2, 2: 3, 4: 4, 15: 1}
DOMAIN_NAME = "domain"


class _Lines:
    """Line reader that remembers the 1-based line number for error messages."""

    def __init__(self, stream: TextIO):
        self._it: Iterator[str] = iter(stream)
        self.lineno = 0

    def next(self, what: str) -> str:
        for raw in self._it:
            self.lineno += 1
            line = raw.strip()
            if line:
                return line
        raise MeshError(msg=f"unexpected end of file while reading {what}", context={"line": self.lineno})

    def maybe_next(self) -> Optional[str]:
        for raw in self._it:
            self.lineno += 1
            line = raw.strip()
            if line:
                return line
        return None

    def fail(self, msg: str) -> MeshError:
        return MeshError(msg=f"line {self.lineno}: {msg}", context={"line": self.lineno})


def _ints(lines: _Lines, text: str, what: str) -> List[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise lines.fail(f"malformed {what}: {text[:60]!r}") from None


def _expect_end(lines: _Lines, name: str) -> None:
    line = lines.next(f"$End{name}")
    if line != f"$End{name}":
        raise lines.fail(f"expected $End{name}, got {line[:40]!r}")


def _read_format(lines: _Lines) -> None:
    parts = lines.next("$MeshFormat").split()
    if len(parts) != 3:
        raise lines.fail("malformed $MeshFormat line")
    if not parts[0].startswith("2."):
        raise lines.fail(f"unsupported MSH version {parts[0]} (need 2.2)")
    if parts[1] != "0":
        raise lines.fail("binary MSH files are not supported")
    _expect_end(lines, "MeshFormat")


def _read_physical_names(lines: _Lines) -> Dict[int, str]:
    count = _ints(lines, lines.next("$PhysicalNames"), "physical name count")
    names: Dict[int, str] = {}
    for _ in range(count[0]):
        line = lines.next("physical name")
        try:
            dim, tag, name = shlex.split(line)
            names[int(tag)] = name
        except ValueError:
            raise lines.fail(f"malformed physical name: {line[:60]!r}") from None
    _expect_end(lines, "PhysicalNames")
    return names


def _read_nodes(lines: _Lines) -> Tuple[Dict[int, int], np.ndarray]:
    (count,) = _ints(lines, lines.next("$Nodes"), "node count")[:1]
    ids: Dict[int, int] = {}
    xyz = np.empty((count, 3))
    for i in range(count):
        parts = lines.next("node").split()
        if len(parts) != 4:
            raise lines.fail("node line needs 'id x y z'")
        try:
            nid = int(parts[0])
            xyz[i] = [float(v) for v in parts[1:]]
        except ValueError:
            raise lines.fail(f"malformed node: {' '.join(parts)[:60]!r}") from None
        if nid in ids:
            raise lines.fail(f"duplicate node id {nid}")
        ids[nid] = i
    _expect_end(lines, "Nodes")
    return ids, xyz


def _read_elements(
    lines: _Lines, node_ids: Dict[int, int]
) -> Tuple[List[List[int]], List[Tuple[List[int], int]]]:
    (count,) = _ints(lines, lines.next("$Elements"), "element count")[:1]
    tets: List[List[int]] = []
    tris: List[Tuple[List[int], int]] = []
    for _ in range(count):
        vals = _ints(lines, lines.next("element"), "element")
        if len(vals) < 3:
            raise lines.fail("element line too short")
        etype, ntags = vals[1], vals[2]
        if etype not in _NODES_PER_TYPE:
            raise lines.fail(f"unsupported element type {etype}")
        nn = _NODES_PER_TYPE[etype]
        if len(vals) != 3 + ntags + nn:
            raise lines.fail(f"element of type {etype} has {len(vals) - 3 - ntags} nodes, expected {nn}")
        if etype in GMSH_SKIPPED:
            continue
        physical = vals[3] if ntags > 0 else 0
        try:
            conn = [node_ids[n] for n in vals[3 + ntags:]]
        except KeyError as e:
            raise lines.fail(f"element references unknown node {e.args[0]}") from None
        if etype == GMSH_TET:
            tets.append(conn)
        else:
            tris.append((conn, physical))
    _expect_end(lines, "Elements")
    return tets, tris


def _skip_section(lines: _Lines, name: str) -> None:
    while True:
        if lines.next(f"$End{name}") == f"$End{name}":
            return


def parse_gmsh(stream: TextIO, *, logger: Optional[logging.Logger] = None) -> Mesh:
    log = logger or _LOG
    lines = _Lines(stream)
    names: Dict[int, str] = {}
    node_ids: Optional[Dict[int, int]] = None
    xyz: Optional[np.ndarray] = None
    tets: List[List[int]] = []
    tris: List[Tuple[List[int], int]] = []
    seen_format = False

    while True:
        line = lines.maybe_next()
        if line is None:
            break
        if not line.startswith("$"):
            raise lines.fail(f"expected a section header, got {line[:40]!r}")
        section = line[1:]
        if section == "MeshFormat":
            _read_format(lines)
            seen_format = True
        elif section == "PhysicalNames":
            names = _read_physical_names(lines)
        elif section == "Nodes":
            node_ids, xyz = _read_nodes(lines)
        elif section == "Elements":
            if node_ids is None:
                raise lines.fail("$Elements before $Nodes")
            tets, tris = _read_elements(lines, node_ids)
        elif section.startswith("End"):
            raise lines.fail(f"unmatched {line}")
        else:
            log.debug("Skipping unknown section %s", line)
            _skip_section(lines, section)

    if not seen_format:
        raise MeshError(msg="missing $MeshFormat section")
    if xyz is None or not tets:
        raise MeshError(msg="mesh has no tetrahedra")

    face_tags: Dict[FaceKey, str] = {}
    for conn, physical in tris:
        face_tags[face_key(conn)] = names.get(physical, f"tag{physical}")
    mesh = Mesh.from_arrays(xyz, np.asarray(tets, dtype=np.int64), face_tags, logger=log)
    log.debug(
        "Parsed mesh: %d vertices, %d tets, %d boundary faces, tags=%s",
        mesh.n_vertices, mesh.n_elements, len(mesh.boundary_faces), list(mesh.tags),
    )
    return mesh


def read_gmsh(path: Union[str, Path], *, logger: Optional[logging.Logger] = None) -> Mesh:
    p = Path(path)
    if not p.exists():
        raise ConfigError(msg=f"mesh file not found: {p}", context={"path": str(p)})
    with open(p, "r", encoding="utf-8") as fh:
        try:
            return parse_gmsh(fh, logger=logger)
        except MeshError as e:
            raise e.with_context(path=str(p))


def write_gmsh(mesh: Mesh, stream: TextIO) -> None:
    tags = list(mesh.tags)
    tag_id = {t: i + 1 for i, t in enumerate(tags)}
    domain_id = len(tags) + 1

    stream.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
    stream.write(f"$PhysicalNames\n{len(tags) + 1}\n")
    for t in tags:
        stream.write(f'2 {tag_id[t]} "{t}"\n')
    stream.write(f'3 {domain_id} "{DOMAIN_NAME}"\n$EndPhysicalNames\n')

    stream.write(f"$Nodes\n{mesh.n_vertices}\n")
    for i, (x, y, z) in enumerate(mesh.vertices.tolist()):
        stream.write(f"{i + 1} {x!r} {y!r} {z!r}\n")
    stream.write("$EndNodes\n")

    fv = mesh.face_vertices()
    n_el = len(mesh.boundary_faces) + mesh.n_elements
    stream.write(f"$Elements\n{n_el}\n")
    eid = 1
    for bf in mesh.boundary_faces:
        a, b, c = (int(v) + 1 for v in fv[bf.element, bf.face])
        tid = tag_id[bf.tag]
        stream.write(f"{eid} {GMSH_TRIANGLE} 2 {tid} {tid} {a} {b} {c}\n")
        eid += 1
    for tet in mesh.tets.tolist():
        a, b, c, d = (v + 1 for v in tet)
        stream.write(f"{eid} {GMSH_TET} 2 {domain_id} {domain_id} {a} {b} {c} {d}\n")
        eid += 1
    stream.write("$EndElements\n")


def save_gmsh(mesh: Mesh, path: Union[str, Path]) -> Path:
    out = Path(path)
    with U.atomic_open(out, "w") as fh:
        write_gmsh(mesh, fh)
    return out
