"""Exact joint sampling of Brownian increments and their exponentially weighted integrals.

For every subinterval [a, b] of a grid and every exponent theta the realization
stores the right-anchored integral

    J_theta[a, b] = int_a^b exp(theta (s - b)) dW_s,

which stays bounded for large theta*b. The vector (J_theta)_theta is Gaussian
with the Ito-isometry covariance; it is drawn through a symmetric square root
of that covariance, one small matrix per subinterval.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from utils.rng import PATH, RngSpec
from .grid import TimeGrid

logger = logging.getLogger(__name__)

MERGE_TOLERANCE = 1e-12


def _merge_exponents(values: Iterable[float]) -> Tuple[float, ...]:
    merged = []
    for theta in sorted(float(v) for v in values):
        if merged and abs(theta - merged[-1]) < MERGE_TOLERANCE:
            continue
        merged.append(theta)
    return tuple(merged)


@dataclass(frozen=True)
class ExponentSet:
    thetas: Tuple[float, ...]

    @classmethod
    def of(cls, *extra: float) -> "ExponentSet":
        """{0, 2} plus the extra exponents, merged within 1e-12."""
        return cls(_merge_exponents((0.0, 2.0) + tuple(extra)))

    def __post_init__(self):
        if not self.has(0.0) or not self.has(2.0):
            raise ValueError("an exponent set must contain 0 and 2")

    def __len__(self):
        return len(self.thetas)

    def has(self, theta: float) -> bool:
        return any(abs(theta - t) < MERGE_TOLERANCE for t in self.thetas)

    def index(self, theta: float) -> int:
        for i, t in enumerate(self.thetas):
            if abs(theta - t) < MERGE_TOLERANCE:
                return i
        raise ValueError(f"exponent {theta!r} missing from realization exponents {self.thetas}")


def covariance_matrix(thetas, delta):
    """Cov(J_t1, J_t2) over a subinterval of length delta, for every pair of exponents.

    delta may be an array; the result then has shape delta.shape + (k, k).
    """
    thetas = np.asarray(thetas, dtype=float)
    delta = np.asarray(delta, dtype=float)[..., None, None]
    total = thetas[:, None] + thetas[None, :]
    safe = np.where(total == 0.0, 1.0, total)
    # (1 - exp(-(t1 + t2) delta)) / (t1 + t2), with the t1 + t2 = 0 limit equal to delta
    value = -np.expm1(-safe * delta) / safe
    return np.where(total == 0.0, delta, value)


def _symmetric_sqrt(cov: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return (eigenvectors * np.sqrt(eigenvalues)[..., None, :]) @ np.swapaxes(eigenvectors, -1, -2)


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    grid: TimeGrid
    d: int
    exponents: ExponentSet
    increments: np.ndarray  # shape (subintervals, exponents, d)
    rng: RngSpec

    def increments_for(self, theta: float) -> np.ndarray:
        """Stored right-anchored integrals for one exponent, shape (subintervals, d)."""
        return self.increments[:, self.exponents.index(theta), :]

    def scaled(self, factor: float) -> "NoiseRealization":
        """Same grid and exponents with every increment multiplied by factor (0 gives the zero path)."""
        return NoiseRealization(self.grid, self.d, self.exponents, self.increments * factor, self.rng)


def sample_noise(grid: TimeGrid, d: int, thetas: ExponentSet, rng: RngSpec) -> NoiseRealization:
    """Draw one path realization on grid; identical (seed, trial) gives bit-identical increments."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not isinstance(thetas, ExponentSet):
        thetas = ExponentSet.of(*thetas)
    spec = rng.for_stream(PATH)
    widths = grid.widths()
    roots = _symmetric_sqrt(covariance_matrix(thetas.thetas, widths))
    normals = spec.generator().standard_normal((widths.size, len(thetas), d))
    increments = np.einsum("nij,njd->nid", roots, normals)
    logger.debug(f"Sampled noise: {widths.size} subintervals, {len(thetas)} exponents, d={d}, trial={spec.trial}")
    return NoiseRealization(grid=grid, d=d, exponents=thetas, increments=increments, rng=spec)


def zero_noise(grid: TimeGrid, d: int, thetas: ExponentSet) -> NoiseRealization:
    """A realization whose increments are all zero; solvers then run deterministically."""
    if not isinstance(thetas, ExponentSet):
        thetas = ExponentSet.of(*thetas)
    increments = np.zeros((grid.size - 1, len(thetas), d))
    return NoiseRealization(grid=grid, d=d, exponents=thetas, increments=increments, rng=RngSpec(seed=0))
