import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from langevin.potentials import BetaIndex, OUTSIDE, cell_index

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntervalIndexSet:
    """Selected cells I_j = [x_j, x_{j+1}) out of j = -N..N-1."""
    N: int
    selected: Tuple[int, ...]

    def __post_init__(self):
        if any(not -self.N <= j < self.N for j in self.selected):
            raise ValueError(f"cell index outside [-{self.N}, {self.N - 1}]: {self.selected}")
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("duplicate cells")

    @property
    def complement(self) -> Tuple[int, ...]:
        chosen = set(self.selected)
        return tuple(j for j in range(-self.N, self.N) if j not in chosen)

    def measure(self, Cx: float) -> float:
        return len(self.selected) * Cx / (2 * self.N)


def complete_intervals(query_xs: Iterable[float], Cx: float, N: int) -> IntervalIndexSet:
    """Cells holding a query, then the largest unused indices until N cells (measure Cx/2) are selected."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    xs = np.unique(np.asarray(list(query_xs), dtype=float).ravel())
    if xs.size > N:
        raise ValueError(f"{xs.size} distinct query positions exceed the budget N={N}")
    cells = cell_index(xs, Cx, N) if xs.size else np.zeros(0, dtype=int)
    selected = sorted({int(j) for j in cells if j != OUTSIDE})
    for j in range(N - 1, -N - 1, -1):
        if len(selected) >= N:
            break
        if j not in selected:
            selected.append(j)
    return IntervalIndexSet(N=N, selected=tuple(sorted(selected)))


@dataclass(frozen=True)
class ReducedIndex:
    bits: Tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def __le__(self, other: "ReducedIndex") -> bool:
        if len(other.bits) != len(self.bits):
            raise ValueError("reduced indices of different length")
        return all(a <= b for a, b in zip(self.bits, other.bits))

    def __str__(self):
        return "".join(str(b) for b in self.bits)


def _check_sizes(beta_len: int, J: IntervalIndexSet):
    if len(J.selected) != J.N:
        raise ValueError(f"completed set must hold N={J.N} cells, has {len(J.selected)}")
    if beta_len != 2 * J.N:
        raise ValueError(f"beta length {beta_len} does not match 2N = {2 * J.N}")


def reduce_index(beta: BetaIndex, J: IntervalIndexSet) -> ReducedIndex:
    """The bits of beta on the cells outside J, in ascending cell order."""
    _check_sizes(len(beta.bits), J)
    return ReducedIndex(tuple(beta.at(j) for j in J.complement))


def restrict(beta: BetaIndex, J: IntervalIndexSet) -> Tuple[int, ...]:
    """The bits of beta on the cells of J, ascending; the part every class member shares."""
    _check_sizes(len(beta.bits), J)
    return tuple(beta.at(j) for j in J.selected)


def expand_reduced(reduced: ReducedIndex, on_J: Sequence[int], J: IntervalIndexSet) -> BetaIndex:
    """Inverse of (reduce_index, restrict)."""
    if len(reduced.bits) != J.N or len(on_J) != len(J.selected):
        raise ValueError("reduced index or J-bits have the wrong length")
    values: Dict[int, int] = dict(zip(J.complement, reduced.bits))
    values.update(zip(J.selected, on_J))
    return BetaIndex(tuple(values[j] for j in range(-J.N, J.N)))


def enumerate_classes(N: int, J: IntervalIndexSet) -> Counter:
    """Class sizes over all of {0,1}^{2N}, keyed by the shared bits on J."""
    if N > 8:
        raise ValueError(f"exhaustive class enumeration is limited to N <= 8, got {N}")
    sizes = Counter()
    for bits in itertools.product((0, 1), repeat=2 * N):
        sizes[restrict(BetaIndex(bits), J)] += 1
    return sizes
