import logging
import math
from typing import Tuple

logger = logging.getLogger(__name__)

JORDAN_TOLERANCE = 1e-9


def _gap_root(u: float, L: float) -> float:
    if not 0 < u < L:
        raise ValueError(f"need 0 < u < L, got u={u}, L={L}")
    return math.sqrt(1 - u / L)


def epsilon_bar(Cx: float, Cv: float, u: float, L: float) -> float:
    """Largest perturbation size eps for which the quadratic event implies the event for all of F_{u, eps}."""
    s = _gap_root(u, L)
    return min(2 * L * (1 - s) * s * Cx, L * s * Cv / 2)


def perturbation_bounds(eps: float, u: float, L: float) -> Tuple[float, float]:
    """Pathwise bounds on |X_t(U) - X_t(U_u)| and |V_t(U) - V_t(U_u)| for U in F_{u, eps}."""
    s = _gap_root(u, L)
    return eps / (2 * L * (1 - s) * s), eps / (L * s)


def cbar(Cx: float, Cv: float, u_r: float, L: float, T: float) -> float:
    """Separation prefactor C-bar; the u_R = L branch is the continuous limit of the general one."""
    if not 0 < u_r <= L:
        raise ValueError(f"need 0 < u_R <= L, got u_R={u_r}, L={L}")
    lead = 3 * Cx / (2 * Cv) - T
    gap = 1 - u_r / L
    if abs(gap) < JORDAN_TOLERANCE:
        return Cx * math.exp(lead) / (4 * L * Cv ** 2)
    s = math.sqrt(gap)
    return math.exp(lead * (1 - s)) * -math.expm1(-(Cx / Cv) * s) / (4 * L * Cv * s)


def bump_measure(count: int, Cx: float, N: int) -> float:
    """Lebesgue measure of the plateaus of count activated bumps, Cx/(4N) each."""
    return count * Cx / (4 * N)
