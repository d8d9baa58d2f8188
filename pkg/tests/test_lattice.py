import itertools
from math import comb

import pytest

from langevin.lattice import (ReducedIndex, binomial_variance_identity, chain_partner, class_experiment,
                              complete_intervals, enumerate_classes, expand_reduced, format_chains, reduce_index,
                              restrict, scd, steps_for_budget, upsilon)
from langevin.potentials import BetaIndex


@pytest.mark.parametrize("N", range(1, 17))
def test_scd_is_valid(N):
    dec = scd(N)
    assert all(dec.validate().values())
    assert len(dec.chains) == comb(N, N // 2)


def test_scd_size_limit():
    with pytest.raises(ValueError):
        scd(0)


def test_format_chains_small():
    assert format_chains(scd(2)) == "00 < 01 < 11\n10"


@pytest.mark.parametrize("N", [4, 5, 8])
def test_upsilon_maps_ranks_along_chains(N):
    dec = scd(N)
    for bits in itertools.product((0, 1), repeat=N):
        k = sum(bits)
        if 2 * k > N:
            with pytest.raises(ValueError):
                upsilon(bits, dec)
            continue
        image = upsilon(bits, dec)
        assert sum(image) == N - k
        assert ReducedIndex(bits) <= ReducedIndex(image)
        assert image == chain_partner(bits)
        if 2 * k == N:
            assert image == bits


def test_chain_partner_beyond_enumeration_limit():
    bits = tuple([0, 1] * 15 + [0] * 10)
    partner = chain_partner(bits)
    assert sum(partner) == len(bits) - sum(bits)
    assert all(a <= b for a, b in zip(bits, partner))


@pytest.mark.parametrize("N", [0, 1, 7, 16, 30])
def test_binomial_variance_identity(N):
    lhs, rhs = binomial_variance_identity(N)
    assert lhs == rhs


def test_complete_intervals():
    J = complete_intervals([0.01, 0.01, -0.2], Cx=1.0, N=4)
    assert len(J.selected) == 4
    assert 0 in J.selected and -2 in J.selected
    assert J.measure(1.0) == pytest.approx(0.5)
    assert set(J.complement).isdisjoint(J.selected)
    with pytest.raises(ValueError):
        complete_intervals([0.0, 0.1, 0.2], Cx=1.0, N=2)


def test_reduce_and_expand_are_inverse():
    J = complete_intervals([0.01, -0.2], Cx=1.0, N=4)
    beta = BetaIndex.parse("10110010")
    reduced = reduce_index(beta, J)
    assert reduced.N == 4
    assert expand_reduced(reduced, restrict(beta, J), J) == beta


def test_class_sizes():
    J = complete_intervals([0.1], Cx=1.0, N=3)
    sizes = enumerate_classes(3, J)
    assert len(sizes) == 2 ** 3
    assert set(sizes.values()) == {2 ** 3}


def test_steps_for_budget():
    assert steps_for_budget("em", 8) == 8
    assert steps_for_budget("rmm", 8) == 4
    with pytest.raises(ValueError):
        steps_for_budget("rmm", 7)
    with pytest.raises(ValueError):
        steps_for_budget("exact", 8)


@pytest.mark.parametrize("solver,N", [("em", 4), ("rmm", 4), ("rmm", 8)])
def test_class_mates_are_indistinguishable(solver, N, rng):
    report = class_experiment(solver, 2.0, 0.25, 8.0, 1.0, N, 1.0, trials=5, rng=rng, L=4.0, Ns_fine=256)
    assert report.equivalence.passed
    assert report.spread_floor > 0
    assert len(report.checks()) == 2


def test_class_separation_is_exercised_near_the_bumps(rng):
    report = class_experiment("rmm", 2.0, 0.02, 8.0, 1.0, 4, 1.0, trials=100, rng=rng, L=4.0, Ns_fine=256)
    assert report.separation.detail["asserted"]
    assert report.separation.detail["hits"] > 0
    assert report.separation.passed
