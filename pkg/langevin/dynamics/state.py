import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Query = Tuple[np.ndarray, float]  # (query point Y_j, query time t_j)


@dataclass(frozen=True, eq=False)
class PhaseState:
    x: np.ndarray
    v: np.ndarray

    @classmethod
    def at_rest(cls, minimizer: np.ndarray) -> "PhaseState":
        """The fixed initial condition X_0 = x*, V_0 = 0."""
        minimizer = np.asarray(minimizer, dtype=float)
        return cls(x=minimizer.copy(), v=np.zeros_like(minimizer))

    @property
    def d(self) -> int:
        return int(self.x.shape[0])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    x: np.ndarray  # shape (len(times), d)
    v: np.ndarray

    def __len__(self):
        return int(self.times.size)

    def __getitem__(self, i) -> PhaseState:
        return PhaseState(self.x[i], self.v[i])


class _Recorder:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.times, self.xs, self.vs = [], [], []

    def add(self, t: float, x: np.ndarray, v: np.ndarray):
        if self.enabled:
            self.times.append(t)
            self.xs.append(x.copy())
            self.vs.append(v.copy())

    def build(self) -> Optional[Trajectory]:
        if not self.enabled:
            return None
        return Trajectory(np.asarray(self.times), np.asarray(self.xs), np.asarray(self.vs))


@dataclass(frozen=True, eq=False)
class SolverRun:
    solver: str
    final: PhaseState
    Ns: int
    query_trace: List[Query] = field(default_factory=list)
    trajectory: Optional[Trajectory] = None
    eta: Optional[np.ndarray] = None

    @property
    def evaluations(self) -> int:
        return len(self.query_trace)

    def query_points(self) -> np.ndarray:
        if not self.query_trace:
            return np.zeros((0, self.final.d))
        return np.asarray([y for y, _ in self.query_trace])

    def query_times(self) -> np.ndarray:
        return np.asarray([t for _, t in self.query_trace], dtype=float)


@dataclass(frozen=True, eq=False)
class MomentState:
    """First two moments of (X, V) for a 1-d quadratic target."""
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.cov.shape != (2, 2) or self.mean.shape != (2,):
            raise ValueError("moment state is 2-dimensional over (x, v)")
        if abs(self.cov[0, 1] - self.cov[1, 0]) > 1e-12 * max(1.0, np.abs(self.cov).max()):
            raise ValueError("covariance is not symmetric")

    @classmethod
    def origin(cls) -> "MomentState":
        return cls(mean=np.zeros(2), cov=np.zeros((2, 2)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.cov).min())
