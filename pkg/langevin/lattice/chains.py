"""Symmetric chain decomposition of the Boolean lattice by bracket matching.

A bit vector is read left to right with 1 as an opening and 0 as a closing
bracket. Matched pairs are frozen; the unmatched positions always read
0...0 1...1, and a chain runs through them by turning the unmatched zeros
into ones from the right.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Tuple

logger = logging.getLogger(__name__)

MAX_N = 24

Bits = Tuple[int, ...]


def _unmatched(bits: Bits) -> Tuple[int, List[int]]:
    """(number of matched pairs, unmatched positions in order)."""
    opened, unmatched, pairs = [], [], 0
    for i, b in enumerate(bits):
        if b:
            opened.append(i)
        elif opened:
            opened.pop()
            pairs += 1
        else:
            unmatched.append(i)
    return pairs, unmatched + opened


@dataclass(frozen=True, eq=False)
class ChainDecomposition:
    N: int
    chains: Tuple[Tuple[Bits, ...], ...]
    _where: Dict[Bits, Tuple[int, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for c, chain in enumerate(self.chains):
            for i, bits in enumerate(chain):
                self._where[bits] = (c, i)

    def chain_of(self, bits: Bits) -> Tuple[Bits, ...]:
        return self.chains[self.locate(bits)[0]]

    def locate(self, bits: Bits) -> Tuple[int, int]:
        try:
            return self._where[tuple(bits)]
        except KeyError:
            raise ValueError(f"{bits} is not a vector of length {self.N}") from None

    def validate(self) -> Dict[str, bool]:
        """Partition, symmetric endpoints, single-bit covering steps and the chain count."""
        seen = [bits for chain in self.chains for bits in chain]
        partition = len(seen) == 2 ** self.N and len(set(seen)) == len(seen)
        symmetric = all(sum(c[0]) + sum(c[-1]) == self.N for c in self.chains)
        covering = all(
            sum(b) == sum(a) + 1 and all(x <= y for x, y in zip(a, b))
            for c in self.chains for a, b in zip(c, c[1:])
        )
        count = len(self.chains) == comb(self.N, self.N // 2)
        return {"partition": partition, "symmetric": symmetric, "covering": covering, "count": count}


def scd(N: int) -> ChainDecomposition:
    if not 1 <= N <= MAX_N:
        raise ValueError(f"N must lie in [1, {MAX_N}], got {N}")
    chains = []
    for bits in itertools.product((0, 1), repeat=N):
        _, free = _unmatched(bits)
        if any(bits[i] for i in free):
            continue  # not the bottom of its chain
        chain = [bits]
        current = list(bits)
        for i in reversed(free):
            current[i] = 1
            chain.append(tuple(current))
        chains.append(tuple(chain))
    logger.debug(f"Symmetric chain decomposition for N={N}: {len(chains)} chains")
    return ChainDecomposition(N=N, chains=tuple(chains))


def chain_partner(bits: Bits) -> Bits:
    """The element of rank N - k on the bracket-matching chain of a rank-k vector, for any N."""
    pairs, free = _unmatched(bits)
    ones = len(bits) - sum(bits) - pairs
    out = list(bits)
    for n, i in enumerate(free):
        out[i] = 1 if n >= len(free) - ones else 0
    return tuple(out)


def upsilon(bits: Bits, dec: ChainDecomposition) -> Bits:
    """Map M_k -> M_{N-k} along the chains, k <= N/2; fixes the middle rank."""
    k = sum(bits)
    if 2 * k > dec.N:
        raise ValueError(f"upsilon is defined for weight k <= N/2, got k={k}, N={dec.N}")
    chain = dec.chain_of(tuple(bits))
    return chain[dec.N - k - sum(chain[0])]


def format_chains(dec: ChainDecomposition) -> str:
    lines = []
    for chain in dec.chains:
        lines.append(" < ".join("".join(str(b) for b in bits) for bits in chain))
    return "\n".join(lines)


def binomial_variance_identity(N: int) -> Tuple[Fraction, Fraction]:
    """(sum_k C(N,k) (N/2 - k)^2, N 2^(N-2)) in exact arithmetic."""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    lhs = Fraction(sum(comb(N, k) * (N - 2 * k) ** 2 for k in range(N + 1)), 4)
    rhs = Fraction(N * 2 ** N, 4)
    return lhs, rhs
