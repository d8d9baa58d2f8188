import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Potential:
    """Gradient field of a member of F(d, ell, L) with its certified Hessian interval."""
    d: int
    grad: Callable[[np.ndarray], np.ndarray]
    hessian_bounds: Tuple[float, float]
    minimizer: np.ndarray
    ell: float
    L: float
    kind: str
    label: str
    curvatures: Optional[np.ndarray] = None  # per-dimension u when the potential is quadratic

    @property
    def is_quadratic(self) -> bool:
        return self.curvatures is not None

    @property
    def condition_number(self) -> float:
        return self.L / self.ell

    def __call__(self, x) -> np.ndarray:
        return self.grad(np.asarray(x, dtype=float))


def _class_bounds(lo: float, hi: float, ell: Optional[float], L: Optional[float]) -> Tuple[float, float]:
    ell = lo if ell is None else float(ell)
    L = hi if L is None else float(L)
    if not 0 < ell <= L:
        raise ValueError(f"need 0 < ell <= L, got ell={ell}, L={L}")
    return ell, L


def quadratic(u: float, d: int = 1, ell: Optional[float] = None, L: Optional[float] = None) -> Potential:
    """U(x) = u |x|^2 / 2."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    u = float(u)
    ell, L = _class_bounds(u, u, ell, L)
    if not ell <= u <= L:
        raise ValueError(f"curvature u={u} outside [ell, L] = [{ell}, {L}]")

    def grad(x):
        return u * x

    return Potential(d=d, grad=grad, hessian_bounds=(u, u), minimizer=np.zeros(d), ell=ell, L=L,
                     kind="quadratic", label=f"quadratic:u={u:g},L={L:g}", curvatures=np.full(d, u))


def separable(components: Sequence[Potential]) -> Potential:
    """Componentwise product of 1-d potentials: dimension i evolves under component i."""
    components = list(components)
    if not components:
        raise ValueError("separable needs at least one component")
    for i, c in enumerate(components):
        if c.d != 1:
            raise ValueError(f"component {i} has dimension {c.d}, expected 1")
    lo = min(c.hessian_bounds[0] for c in components)
    hi = max(c.hessian_bounds[1] for c in components)
    ell = min(c.ell for c in components)
    L = max(c.L for c in components)
    if len({c.L for c in components}) > 1:
        raise ValueError("all components must share the same L")
    d = len(components)

    if all(c.is_quadratic for c in components):
        curvatures = np.array([c.curvatures[0] for c in components])

        def grad(x):
            return curvatures * x
    else:
        curvatures = None
        grads = [c.grad for c in components]

        def grad(x):
            out = np.empty_like(x)
            for i, g in enumerate(grads):
                out[i:i + 1] = g(x[i:i + 1])
            return out

    minimizer = np.concatenate([c.minimizer for c in components])
    label = "separable[" + "|".join(c.label for c in components) + "]"
    return Potential(d=d, grad=grad, hessian_bounds=(lo, hi), minimizer=minimizer, ell=ell, L=L,
                     kind="separable", label=label, curvatures=curvatures)


def smooth_nonquadratic(ell: float, L: float, d: int = 1, amplitude: float = 1.0) -> Potential:
    """U(x) = (ell+L)/4 |x|^2 + amplitude (L-ell)/4 sum_i (1 - cos x_i).

    The Hessian is diagonal with entries (ell+L)/2 + amplitude (L-ell)/4 cos x_i,
    so it stays inside [(3 ell + L)/4, (ell + 3 L)/4] for amplitude in [0, 1].
    """
    if not 0 < ell < L:
        raise ValueError(f"need 0 < ell < L, got ell={ell}, L={L}")
    if not 0.0 <= amplitude <= 1.0:
        raise ValueError(f"amplitude must lie in [0, 1], got {amplitude}")
    center = (ell + L) / 2
    wiggle = amplitude * (L - ell) / 4

    def grad(x):
        return center * x + wiggle * np.sin(x)

    curvatures = np.full(d, center) if amplitude == 0.0 else None
    return Potential(d=d, grad=grad, hessian_bounds=(center - wiggle, center + wiggle), minimizer=np.zeros(d),
                     ell=float(ell), L=float(L), kind="smooth", label=f"smooth:ell={ell:g},L={L:g}",
                     curvatures=curvatures)
