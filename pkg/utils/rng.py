"""Seeded, splittable random streams.

Every random draw in the package comes from a generator built here, keyed by
(master seed, trial index, stream). The path noise and the algorithm's own
randomness live on different streams so one can be held fixed while the other
is resampled.
"""
from dataclasses import dataclass, replace

import numpy as np

# Stream tags
PATH = 0        # Brownian path (omega)
ALGORITHM = 1   # midpoint draws eta (omega tilde)
PROBLEM = 2     # potential indices beta

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    """Master seed plus trial index, stream tag and an optional substream (e.g. one per step count)."""
    seed: int
    trial: int = 0
    stream: int = PATH
    substream: int = 0

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("seed is mandatory")
        if self.trial < 0:
            raise ValueError(f"trial index must be non-negative, got {self.trial}")
        if self.substream < 0:
            raise ValueError(f"substream must be non-negative, got {self.substream}")

    def for_trial(self, trial: int) -> "RngSpec":
        return replace(self, trial=trial)

    def for_stream(self, stream: int, substream: int = 0) -> "RngSpec":
        return replace(self, stream=stream, substream=substream)

    def generator(self) -> np.random.Generator:
        key = (int(self.stream), int(self.trial), int(self.substream))
        sequence = np.random.SeedSequence(int(self.seed) & SEED_MASK, spawn_key=key)
        return np.random.Generator(np.random.PCG64(sequence))


def draw_midpoints(spec: RngSpec, count: int, substream: int = 0) -> np.ndarray:
    """i.i.d. uniform [0,1] midpoint fractions on the algorithm stream."""
    return spec.for_stream(ALGORITHM, substream).generator().uniform(0.0, 1.0, size=count)
