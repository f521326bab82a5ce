# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Plain-text dump of reference-element tables for cross-language golden tests.

    CURVEDG-REFELEM 1
    degree 3
    [colloc_nodes 20 3]
    <row-major values, one row per line, 17 significant digits>
    ...
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, TextIO, Union

import numpy as np

from ..core.exceptions import FormatError
from ..core.utils import U
from .reference_element import ReferenceElement

MAGIC = "CURVEDG-REFELEM"
VERSION = 1


def _tables(ref: ReferenceElement) -> Dict[str, np.ndarray]:
    return {
        "colloc_nodes": ref.colloc_nodes,
        "cub_nodes": ref.cub_nodes,
        "cub_weights": ref.cub_weights.reshape(-1, 1),
        "face_nodes": ref.face_nodes.reshape(-1, 3),
        "face_weights": ref.face_weights.reshape(-1, 1),
        "vandermonde": ref.vandermonde,
        "grad_vandermonde_r": ref.grad_vandermonde[0],
        "grad_vandermonde_s": ref.grad_vandermonde[1],
        "grad_vandermonde_t": ref.grad_vandermonde[2],
        "face_vandermonde": ref.face_vandermonde,
    }


def format_tables(ref: ReferenceElement) -> str:
    lines = [f"{MAGIC} {VERSION}", f"degree {ref.degree}"]
    for name, arr in _tables(ref).items():
        rows, cols = arr.shape
        lines.append(f"[{name} {rows} {cols}]")
        for row in arr:
            lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def dump_tables(ref: ReferenceElement, path: Union[str, Path]) -> Path:
    out = Path(path)
    U.atomic_write_text(out, format_tables(ref))
    return out


def parse_tables(stream: TextIO) -> Dict[str, np.ndarray]:
    header = stream.readline().split()
    if len(header) != 2 or header[0] != MAGIC:
        raise FormatError(msg="not a reference-element table dump")
    if int(header[1]) != VERSION:
        raise FormatError(msg=f"unsupported table dump version {header[1]}")
    degree_line = stream.readline().split()
    out: Dict[str, np.ndarray] = {"degree": np.array([[int(degree_line[1])]])}
    line = stream.readline()
    while line:
        line = line.strip()
        if not line:
            line = stream.readline()
            continue
        if not (line.startswith("[") and line.endswith("]")):
            raise FormatError(msg=f"expected section header, got {line[:40]!r}")
        name, rows, cols = line[1:-1].split()
        data = [stream.readline().split() for _ in range(int(rows))]
        arr = np.array(data, dtype=float)
        if arr.shape != (int(rows), int(cols)):
            raise FormatError(msg=f"section {name} has shape {arr.shape}, header says {rows}x{cols}")
        out[name] = arr
        line = stream.readline()
    return out


def load_tables(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tables(fh)
