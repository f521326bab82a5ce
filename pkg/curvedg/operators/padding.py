# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Zero padding shared by the solution stores and the operator blocks.

A padded block holds `n` live slots rounded up to a multiple of ALIGN. Operator
matrices are kept column-major: each column is one padded block, so a
(rows, cols) matrix occupies cols * padded_length(rows) slots.
"""
from __future__ import annotations

import numpy as np

ALIGN = 16


def padded_length(n: int, align: int = ALIGN) -> int:
    return align * -(-int(n) // align)


def column_major_blocks(a: np.ndarray, *, padded: bool = True) -> np.ndarray:
    """
    Column-major storage of a stack of matrices (..., rows, cols): an array
    (..., cols, ld) with ld = padded_length(rows) and zeros past `rows`.
    Read-only.
    """
    a = np.asarray(a, dtype=float)
    rows = a.shape[-2]
    ld = padded_length(rows) if padded else rows
    out = np.zeros(a.shape[:-2] + (a.shape[-1], ld))
    out[..., :rows] = np.swapaxes(a, -1, -2)
    out.setflags(write=False)
    return out


def logical_view(blocks: np.ndarray, rows: int) -> np.ndarray:
    """(..., rows, cols) view onto column-major blocks (..., cols, ld); no copy."""
    return np.swapaxes(blocks[..., :rows], -1, -2)
