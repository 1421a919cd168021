"""Deterministic random streams keyed by (seed, stream indices)."""
from __future__ import annotations

import numpy as np

from paired_gof.errors import ConfigurationError


class RandomSource:
    """A PCG64 generator derived from a seed and a tuple of stream indices.

    Two sources with the same seed and key produce the same draws no matter
    which thread creates them or in which order, so replicate ``r`` always
    sees the same sample.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()) -> None:
        if seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def stream(self, *indices: int) -> RandomSource:
        """Independent child source for the given indices."""
        return RandomSource(self.seed, self.key + tuple(indices))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, key={self.key})"
