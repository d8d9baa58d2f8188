import logging
from typing import Sequence, Tuple

import numpy as np

from .grid import GridError
from .sampler import NoiseRealization

logger = logging.getLogger(__name__)

# An exponential integrand coef * exp(theta * (s - anchor))
Term = Tuple[float, float, float]


def _span(nr: NoiseRealization, a: float, c: float) -> Tuple[int, int]:
    ia = nr.grid.index(a)
    ic = nr.grid.index(c)
    if ia > ic:
        raise GridError(f"interval [{a}, {c}] is reversed")
    return ia, ic


def weighted_integrals(nr: NoiseRealization, a: float, c: float, thetas: Sequence[float], anchor: float) -> np.ndarray:
    """int_a^c exp(theta (s - anchor)) dW_s for several exponents at once, shape (len(thetas), d)."""
    ia, ic = _span(nr, a, c)
    out = np.zeros((len(thetas), nr.d))
    if ia == ic:
        return out
    right = nr.grid.points[ia + 1:ic + 1]
    for row, theta in enumerate(thetas):
        stored = nr.increments_for(theta)[ia:ic]
        if ic - ia == 1 and right[0] == anchor:
            out[row] = stored[0]
            continue
        weights = np.exp(theta * (right - anchor))
        out[row] = weights @ stored
    return out


def weighted_integral(nr: NoiseRealization, a: float, c: float, theta: float, anchor: float) -> np.ndarray:
    """int_a^c exp(theta (s - anchor)) dW_s composed exactly from the stored subinterval integrals."""
    return weighted_integrals(nr, a, c, (theta,), anchor)[0]


def wtilde(nr: NoiseRealization, t: float, theta: float) -> np.ndarray:
    """The unanchored weighted Brownian motion int_0^t exp(theta s) dW_s."""
    return weighted_integral(nr, 0.0, t, theta, anchor=0.0)


def ito_inner(terms_a: Sequence[Term], terms_b: Sequence[Term], start: float, stop: float) -> float:
    """E[int f dW * int g dW] over [start, stop] for sums of exponential integrands (Ito isometry)."""
    if stop < start:
        raise ValueError(f"interval [{start}, {stop}] is reversed")
    width = stop - start
    total = 0.0
    for coef_a, theta_a, anchor_a in terms_a:
        for coef_b, theta_b, anchor_b in terms_b:
            kappa = theta_a + theta_b
            scale = np.exp(kappa * stop - theta_a * anchor_a - theta_b * anchor_b)
            if kappa == 0.0:
                total += coef_a * coef_b * scale * width
            else:
                total += coef_a * coef_b * scale * (-np.expm1(-kappa * width) / kappa)
    return float(total)
