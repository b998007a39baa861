"""Range min/max over integer arrays whose neighbours differ by exactly one.

Only the step bitmap is kept (1 for +1, 0 for -1) together with the value
that precedes the first entry; every value is that base plus the excess of
the bitmap, so a range min-max tree answers the queries directly.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .bits import ParenBitVector
from .static import StaticRmm, StaticRmmConfig


class Pm1Array:
    """Read-only +-1 array.  ``base`` is the value just before index 0."""

    def __init__(self, deltas: ParenBitVector, base: int = 0, config: Optional[StaticRmmConfig] = None):
        self.deltas = deltas
        self.base = base
        self.rmm = StaticRmm(deltas, config)

    @classmethod
    def from_deltas(cls, bits: Union[ParenBitVector, str, Iterable[int]], base: int = 0,
                    config: Optional[StaticRmmConfig] = None) -> "Pm1Array":
        if not isinstance(bits, ParenBitVector):
            bits = ParenBitVector(bits)
        return cls(bits, base, config)

    @classmethod
    def from_values(cls, values: Sequence[int], base: Optional[int] = None,
                    config: Optional[StaticRmmConfig] = None) -> "Pm1Array":
        """Encode ``values``.  ``base`` defaults to ``values[0] - 1`` so the first
        step is +1; for an array starting at 1 that is the usual base 0."""
        v = np.asarray(values, dtype=np.int64)
        if v.size == 0:
            raise ValueError("cannot encode an empty array")
        if base is None:
            base = int(v[0]) - 1
        step = np.diff(np.concatenate(([base], v)))
        bad = np.flatnonzero(np.abs(step) != 1)
        if bad.size:
            k = int(bad[0])
            where = "the base" if k == 0 else f"index {k - 1}"
            raise ValueError(f"values[{k}] differs from {where} by {int(step[k])}, not +-1")
        return cls(ParenBitVector.from_numpy((step > 0).astype(np.uint8)), base, config)

    def __len__(self) -> int:
        return len(self.deltas)

    def value_at(self, i: int) -> int:
        return self.base + self.rmm.excess(i)

    def __getitem__(self, i: int) -> int:
        return self.value_at(i)

    def to_list(self) -> list:
        return (self.base + np.cumsum(self.deltas.to_numpy().astype(np.int64) * 2 - 1)).tolist()

    def rmq(self, i: int, j: int) -> int:
        """Leftmost index of the minimum of ``values[i..j]``."""
        return self.rmm.rmqi(i, j)[0]

    def rMq(self, i: int, j: int) -> int:
        """Leftmost index of the maximum of ``values[i..j]``."""
        return self.rmm.RMQi(i, j)[0]

    def min_value(self, i: int, j: int) -> int:
        return self.base + self.rmm.rmqi(i, j)[1]

    def max_value(self, i: int, j: int) -> int:
        return self.base + self.rmm.RMQi(i, j)[1]
