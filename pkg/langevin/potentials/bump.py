import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

OUTSIDE = -(1 << 30)  # cell index for positions outside [-Cx/2, Cx/2]


@dataclass(frozen=True)
class Bump1D:
    """C^1 piecewise-quadratic bump of height eps and slope at most xi, supported on [0, Cx/(2N)]."""
    Cx: float
    N: int
    xi: float

    @property
    def a(self) -> float:
        return self.xi * 4 * self.N / self.Cx

    @property
    def eps(self) -> float:
        return self.Cx * self.xi / (8 * self.N)

    @property
    def width(self) -> float:
        return self.Cx / (2 * self.N)

    @property
    def plateau(self):
        """The middle stretch [Cx/(8N), 3Cx/(8N)] on which g >= eps/2."""
        return self.width / 4, 3 * self.width / 4

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a, q = self.a, self.width / 4
        rise = a * x ** 2
        top = -a * (x - 2 * q) ** 2 + 2 * a * q ** 2
        fall = a * (x - 4 * q) ** 2
        out = np.where(x < q, rise, np.where(x <= 3 * q, top, fall))
        return np.where((x < 0.0) | (x > 4 * q), 0.0, out)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a, q = self.a, self.width / 4
        rise = 2 * a * x
        top = -2 * a * (x - 2 * q)
        fall = 2 * a * (x - 4 * q)
        out = np.where(x < q, rise, np.where(x <= 3 * q, top, fall))
        return np.where((x < 0.0) | (x > 4 * q), 0.0, out)


def bump_g(Cx: float, N: int, xi: float) -> Bump1D:
    if not Cx > 0 or not xi > 0:
        raise ValueError(f"Cx and xi must be positive, got Cx={Cx}, xi={xi}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return Bump1D(Cx=float(Cx), N=int(N), xi=float(xi))


def bump_centers(Cx: float, N: int) -> np.ndarray:
    """Cell edges x_j = Cx j / (2N) for j = -N..N; bump j sits on [x_j, x_{j+1}]."""
    return Cx * np.arange(-N, N + 1) / (2 * N)


def cell_index(x, Cx: float, N: int) -> np.ndarray:
    """Index j of the cell [x_j, x_{j+1}) holding x (last cell closed), OUTSIDE beyond [-Cx/2, Cx/2]."""
    edges = bump_centers(Cx, N)
    x = np.asarray(x, dtype=float)
    j = np.searchsorted(edges, x, side="right") - 1
    j = np.where(x == edges[-1], 2 * N - 1, j)
    inside = (j >= 0) & (j <= 2 * N - 1)
    return np.where(inside, j - N, OUTSIDE)
