import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from utils.rng import PROBLEM, RngSpec
from .base import Potential
from .bump import Bump1D, bump_g, bump_centers, cell_index, OUTSIDE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BetaIndex:
    """Bits beta_j for j = -N..N-1, stored left to right."""
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) % 2 or not self.bits:
            raise ValueError(f"a beta index has even positive length 2N, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("beta bits must be 0 or 1")

    @classmethod
    def zeros(cls, N: int) -> "BetaIndex":
        return cls((0,) * (2 * N))

    @classmethod
    def ones(cls, N: int) -> "BetaIndex":
        return cls((1,) * (2 * N))

    @classmethod
    def parse(cls, text: str) -> "BetaIndex":
        return cls(tuple(int(ch) for ch in text.strip()))

    @property
    def N(self) -> int:
        return len(self.bits) // 2

    def at(self, j: int) -> int:
        return self.bits[j + self.N]

    def active(self) -> Tuple[int, ...]:
        """Cell indices j with beta_j = 1."""
        return tuple(j - self.N for j, b in enumerate(self.bits) if b)

    def __str__(self):
        return "".join(str(b) for b in self.bits)


def beta_ge(upper: BetaIndex, lower: BetaIndex) -> bool:
    """Componentwise upper >= lower."""
    if len(upper.bits) != len(lower.bits):
        raise ValueError("beta indices of different length")
    return all(a >= b for a, b in zip(upper.bits, lower.bits))


def adversarial(u: float, Cx: float, N: int, xi: float, beta: BetaIndex,
                ell: Optional[float] = None, L: Optional[float] = None) -> Potential:
    """grad U_beta(x) = u x + sum_j beta_j g(x - x_j), a 1-d member of F_{u, eps}.

    Each bump lives on its own cell, so a query only ever reads the bit of the
    cell holding it; off-support positions get u x plus an exact zero.
    """
    bump: Bump1D = bump_g(Cx, N, xi)
    if len(beta.bits) != 2 * N:
        raise ValueError(f"beta has length {len(beta.bits)}, expected 2N = {2 * N}")
    lo, hi = u - xi, u + xi
    ell = lo if ell is None else float(ell)
    L = hi if L is None else float(L)
    if not ell < u:
        raise ValueError(f"need ell < u, got ell={ell}, u={u}")
    if u + xi > L:
        raise ValueError(f"u + xi = {u + xi} exceeds L = {L}")
    if lo < ell:
        raise ValueError(f"u - xi = {lo} falls below ell = {ell}")

    edges = bump_centers(Cx, N)
    mask = np.asarray(beta.bits, dtype=float)
    u = float(u)

    def grad(x):
        j = cell_index(x, Cx, N)
        inside = j != OUTSIDE
        slot = np.where(inside, j + N, 0)
        offset = x - edges[slot]
        bumps = np.where(inside, mask[slot] * bump.value(offset), 0.0)
        return u * x + bumps

    potential = Potential(d=1, grad=grad, hessian_bounds=(lo, hi), minimizer=np.zeros(1), ell=ell, L=L,
                          kind="adversarial", label=f"adversarial:u={u:g},N={N},beta={beta}")
    logger.debug(f"Built adversarial potential N={N}, eps={bump.eps:.3e}, active cells {beta.active()}")
    return potential


def adversarial_family(u: float, Cx: float, N: int, xi: float, betas: Sequence[BetaIndex],
                       ell: Optional[float] = None, L: Optional[float] = None):
    return [adversarial(u, Cx, N, xi, beta, ell=ell, L=L) for beta in betas]


def random_beta(N: int, spec: RngSpec, substream: int = 0) -> BetaIndex:
    """A uniformly random index drawn on the problem stream of spec."""
    bits = spec.for_stream(PROBLEM, substream).generator().integers(0, 2, size=2 * N)
    return BetaIndex(tuple(int(b) for b in bits))
