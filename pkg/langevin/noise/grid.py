import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Provenance tags
NODE = "node"
MIDPOINT = "midpoint"
EXTRA = "extra"
HORIZON = "horizon"


class GridError(ValueError):
    """A requested time or interval is not covered by the grid."""


def step_node(k: int, Ns: int, T: float) -> float:
    """Time of the k-th uniform node; every consumer must use this exact expression."""
    if k == Ns:
        return float(T)
    return k * (T / Ns)


def midpoint_time(k: int, eta: float, Ns: int, T: float) -> float:
    """Time s_k + eta*h of the k-th random midpoint."""
    h = T / Ns
    if eta == 1.0 and k + 1 == Ns:
        return float(T)
    return k * h + eta * h


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray
    tags: Tuple[str, ...]

    def __post_init__(self):
        points = self.points
        if points.ndim != 1 or points.size < 2:
            raise GridError("a grid needs at least the points 0 and T")
        if points[0] != 0.0:
            raise GridError(f"grid must start at 0, got {points[0]}")
        if not np.all(np.diff(points) > 0):
            raise GridError("grid points must be strictly increasing")

    @property
    def T(self) -> float:
        return float(self.points[-1])

    @property
    def size(self) -> int:
        return int(self.points.size)

    def index(self, t: float) -> int:
        """Index of t on the grid; exact bit comparison, never interpolates."""
        i = int(np.searchsorted(self.points, t))
        if i >= self.points.size or self.points[i] != t:
            raise GridError(f"time {t!r} is not a grid point")
        return i

    def contains(self, t: float) -> bool:
        i = int(np.searchsorted(self.points, t))
        return i < self.points.size and self.points[i] == t

    def widths(self) -> np.ndarray:
        return np.diff(self.points)


def _check_time(t: float, T: float, what: str):
    if t is None or math.isnan(t):
        raise GridError(f"{what} is NaN")
    if t < 0.0 or t > T:
        raise GridError(f"{what} {t!r} outside [0, {T}]")


def plan_grid(Ns: int, T: float, midpoints: Optional[Sequence[float]] = None,
              extra: Optional[Iterable[float]] = None) -> TimeGrid:
    """Merge the uniform nodes, the random midpoints and any extra query times into one grid."""
    if Ns < 1:
        raise GridError(f"Ns must be >= 1, got {Ns}")
    if not T > 0 or math.isnan(T):
        raise GridError(f"horizon T must be positive, got {T}")
    midpoints = [] if midpoints is None else list(midpoints)
    if len(midpoints) not in (0, Ns):
        raise GridError(f"expected {Ns} midpoint fractions, got {len(midpoints)}")

    tagged = {}
    for t in (float(x) for x in (extra or [])):
        _check_time(t, T, "extra time")
        tagged.setdefault(t, EXTRA)
    for k, eta in enumerate(midpoints):
        eta = float(eta)
        if math.isnan(eta) or eta < 0.0 or eta > 1.0:
            raise GridError(f"midpoint fraction eta[{k}] = {eta!r} outside [0, 1]")
        tagged[midpoint_time(k, eta, Ns, T)] = MIDPOINT
    for k in range(Ns + 1):
        tagged[step_node(k, Ns, T)] = NODE
    tagged[float(T)] = HORIZON
    tagged.setdefault(0.0, NODE)

    times = sorted(tagged)
    return TimeGrid(points=np.asarray(times, dtype=float), tags=tuple(tagged[t] for t in times))


def merge_grids(*grids: TimeGrid) -> TimeGrid:
    """Union of several grids over the same horizon."""
    horizons = {g.T for g in grids}
    if len(horizons) != 1:
        raise GridError(f"cannot merge grids with horizons {sorted(horizons)}")
    tagged = {}
    for grid in grids:
        for t, tag in zip(grid.points.tolist(), grid.tags):
            tagged.setdefault(t, tag)
    times = sorted(tagged)
    return TimeGrid(points=np.asarray(times, dtype=float), tags=tuple(tagged[t] for t in times))
