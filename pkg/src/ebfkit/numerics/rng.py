"""Reproducible, independent random number streams.

Streams are built on the counter-based Philox-4x64 generator keyed directly
by (master seed, stream index), so any worker can construct its stream
without coordination and identical keys always reproduce the same sequence.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngStream"]

_MASK64 = (1 << 64) - 1


class RngStream:
    """One independent stream of a keyed Philox generator family.

    Instances are single-owner: parallel code takes distinct stream indices
    rather than sharing one stream.
    """

    def __init__(self, seed: int, index: int = 0):
        self.seed = int(seed) & _MASK64
        self.index = int(index) & _MASK64
        key = np.array([self.seed, self.index], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def substream(self, offset: int) -> "RngStream":
        """Stream with index shifted by offset under the same seed."""
        return RngStream(self.seed, (self.index + int(offset)) & _MASK64)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, index={self.index})"
