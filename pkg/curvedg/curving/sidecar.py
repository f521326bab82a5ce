# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Curved-mesh sidecar, binary little-endian:

    offset  type            field
    0       char[4]         magic "CDG1"
    4       uint32          format version (1)
    8       uint32          DG degree p
    12      uint64          element count K of the CFD mesh
    20      uint64          curved-element count C
    28      uint32          N_p
    32      C records       uint64 element index, float64[N_p][3] node coordinates
    end-32  byte[32]        SHA-256 of everything before it

Element indices are strictly increasing.
"""
from __future__ import annotations

import hashlib
import struct
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from ..core.exceptions import ConfigError, FormatError
from ..core.utils import U
from ..mesh.mesh import Mesh
from ..refelem.basis import n_basis
from .curved_mesh import CurvedMesh

MAGIC = b"CDG1"
VERSION = 1
_HEADER = struct.Struct("<4sIIQQI")
_INDEX = struct.Struct("<Q")
_DIGEST = 32


def encode_sidecar(curved: CurvedMesh) -> bytes:
    npn = n_basis(curved.degree)
    parts = [_HEADER.pack(MAGIC, VERSION, curved.degree, curved.mesh.n_elements, curved.n_curved, npn)]
    for k, nodes in curved.curved.items():
        if nodes.shape != (npn, 3):
            raise FormatError(msg=f"curved element {k} has {nodes.shape[0]} nodes, expected {npn}")
        parts.append(_INDEX.pack(k))
        parts.append(np.ascontiguousarray(nodes, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def decode_sidecar(data: bytes) -> Tuple[int, int, Dict[int, np.ndarray]]:
    """Returns (degree, element count, curved nodes)."""
    if len(data) < _HEADER.size + _DIGEST:
        raise FormatError(msg="curved-mesh sidecar is truncated")
    body, digest = data[:-_DIGEST], data[-_DIGEST:]
    if hashlib.sha256(body).digest() != digest:
        raise FormatError(msg="curved-mesh sidecar checksum mismatch")
    magic, version, degree, n_elem, n_curved, npn = _HEADER.unpack_from(body, 0)
    if magic != MAGIC:
        raise FormatError(msg="not a curved-mesh sidecar (bad magic)")
    if version != VERSION:
        raise FormatError(msg=f"unsupported sidecar version {version}")
    if npn != n_basis(degree):
        raise FormatError(msg=f"sidecar N_p={npn} does not match degree {degree}")
    record = _INDEX.size + 8 * 3 * npn
    if len(body) != _HEADER.size + n_curved * record:
        raise FormatError(msg="sidecar payload size does not match its header")

    curved: Dict[int, np.ndarray] = {}
    off = _HEADER.size
    last = -1
    for _ in range(n_curved):
        (k,) = _INDEX.unpack_from(body, off)
        if k <= last or k >= n_elem:
            raise FormatError(msg=f"sidecar element index {k} out of order or range")
        last = k
        arr = np.frombuffer(body, dtype="<f8", count=3 * npn, offset=off + _INDEX.size)
        curved[int(k)] = arr.reshape(npn, 3).astype(float)
        off += record
    return int(degree), int(n_elem), curved


def write_sidecar(curved: CurvedMesh, path: Union[str, Path]) -> Path:
    out = Path(path)
    U.atomic_write_bytes(out, encode_sidecar(curved))
    return out


def read_sidecar(path: Union[str, Path], mesh: Mesh) -> CurvedMesh:
    p = Path(path)
    if not p.exists():
        raise ConfigError(msg=f"curved-mesh sidecar not found: {p}", context={"path": str(p)})
    degree, n_elem, curved = decode_sidecar(p.read_bytes())
    if n_elem != mesh.n_elements:
        raise FormatError(
            msg=f"sidecar was written for {n_elem} elements, mesh has {mesh.n_elements}",
            context={"path": str(p)},
        )
    return CurvedMesh(mesh=mesh, degree=degree, curved=curved)
