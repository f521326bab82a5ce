# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Padded structure-of-arrays storage for element data.

Each element owns `n_fields` blocks of `block` slots; block = 16 * ceil(n / 16)
so every block starts on a multiple of 16. Slots past the logical length are
padding and stay zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Type, TypeVar

import numpy as np

from ..core.exceptions import ConfigError, NumericsError
from ..euler.state import N_CONSERVED
from ..operators.padding import ALIGN, padded_length

__all__ = ["ALIGN", "BlockStore", "SolutionStore", "TraceStore", "padded_length"]

S = TypeVar("S", bound="BlockStore")


@dataclass(eq=False)
class BlockStore:
    """Flat float64 buffer viewed as (K, n_fields, block) with `length` live slots."""

    data: np.ndarray
    n_elements: int
    n_fields: int
    length: int
    block: int

    @classmethod
    def zeros(cls: Type[S], n_elements: int, length: int, n_fields: int = N_CONSERVED, *, padded: bool = True) -> S:
        if n_elements < 0 or length < 1:
            raise ConfigError(msg="store needs n_elements >= 0 and length >= 1", context={"K": n_elements, "n": length})
        block = padded_length(length) if padded else int(length)
        return cls(np.zeros(n_elements * n_fields * block), int(n_elements), int(n_fields), int(length), block)

    @classmethod
    def from_values(cls: Type[S], values: np.ndarray, *, padded: bool = True) -> S:
        """Pack logical values (K, n_fields, length)."""
        values = np.asarray(values, dtype=float)
        K, nf, n = values.shape
        store = cls.zeros(K, n, nf, padded=padded)
        store.blocks()[:, :, :n] = values
        return store

    @property
    def padded(self) -> bool:
        return self.block != self.length

    def offset(self, k: int, c: int) -> int:
        return (int(k) * self.n_fields + int(c)) * self.block

    def blocks(self) -> np.ndarray:
        return self.data.reshape(self.n_elements, self.n_fields, self.block)

    def live(self) -> np.ndarray:
        """View (K, n_fields, length) of the live slots; writes land in the buffer."""
        return self.blocks()[:, :, : self.length]

    def values(self) -> np.ndarray:
        """Contiguous logical copy (K, n_fields, length)."""
        return np.ascontiguousarray(self.blocks()[:, :, : self.length])

    def with_data(self: S, data: np.ndarray) -> S:
        if data.shape != self.data.shape:
            raise ConfigError(msg="buffer does not match the store layout", context={"expected": self.data.shape, "got": data.shape})
        return type(self)(data, self.n_elements, self.n_fields, self.length, self.block)

    def like(self: S) -> S:
        return self.with_data(np.zeros_like(self.data))

    def copy(self: S) -> S:
        return self.with_data(self.data.copy())

    def repack(self: S, *, padded: bool) -> S:
        return type(self).from_values(self.values(), padded=padded)

    def padding_is_zero(self) -> bool:
        return not self.padded or not np.any(self.blocks()[:, :, self.length :])

    def assert_padding(self, where: str = "kernel") -> None:
        if not self.padding_is_zero():
            raise NumericsError(msg=f"non-zero padding after {where}", context={"block": self.block, "length": self.length})


class SolutionStore(BlockStore):
    """Conserved nodal values: 5 blocks of N_p per element."""

    @classmethod
    def for_elements(cls, n_elements: int, n_basis: int, *, padded: bool = True) -> "SolutionStore":
        return cls.zeros(n_elements, n_basis, N_CONSERVED, padded=padded)


class TraceStore(BlockStore):
    """Face-quadrature values: 5 blocks of 4 N_g per element."""

    @classmethod
    def for_elements(cls, n_elements: int, n_face_points: int, *, padded: bool = True) -> "TraceStore":
        return cls.zeros(n_elements, n_face_points, N_CONSERVED, padded=padded)
