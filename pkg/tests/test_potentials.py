import numpy as np
import pytest

from langevin.potentials import (OUTSIDE, BetaIndex, adversarial, beta_ge, bump_centers, bump_g, cell_index,
                                 quadratic, random_beta, separable, smooth_nonquadratic)
from utils.rng import RngSpec


def _slopes(p, xs, step=1e-6):
    return (p(xs + step) - p(xs - step)) / (2 * step)


def test_quadratic_gradient_and_bounds():
    p = quadratic(1.5, d=3, ell=1.0, L=4.0)
    x = np.array([1.0, -2.0, 0.5])
    assert np.allclose(p(x), 1.5 * x)
    assert p.hessian_bounds == (1.5, 1.5)
    assert p.is_quadratic
    assert p.condition_number == 4.0
    with pytest.raises(ValueError):
        quadratic(5.0, L=4.0)
    with pytest.raises(ValueError):
        quadratic(1.0, d=0)


def test_separable_uses_one_curvature_per_dimension():
    p = separable([quadratic(u, ell=1.0, L=4.0) for u in (1.0, 2.0, 3.0)])
    assert p.d == 3
    assert np.allclose(p.curvatures, [1.0, 2.0, 3.0])
    assert np.allclose(p(np.ones(3)), [1.0, 2.0, 3.0])
    assert p.hessian_bounds == (1.0, 3.0)
    with pytest.raises(ValueError):
        separable([quadratic(1.0, L=2.0), quadratic(1.0, L=4.0)])


def test_separable_of_nonquadratic_components():
    p = separable([smooth_nonquadratic(1.0, 4.0), quadratic(2.0, ell=1.0, L=4.0)])
    assert not p.is_quadratic
    x = np.array([0.7, -1.2])
    assert p(x)[0] == pytest.approx(smooth_nonquadratic(1.0, 4.0)(x[:1])[0])
    assert p(x)[1] == pytest.approx(-2.4)


def test_smooth_nonquadratic_stays_in_class(sample_points):
    p = smooth_nonquadratic(1.0, 4.0)
    lo, hi = p.hessian_bounds
    slopes = _slopes(p, sample_points)
    assert lo >= p.ell and hi <= p.L
    assert slopes.min() >= lo - 1e-6
    assert slopes.max() <= hi + 1e-6
    assert smooth_nonquadratic(1.0, 4.0, amplitude=0.0).is_quadratic


def test_bump_shape():
    bump = bump_g(Cx=1.0, N=4, xi=2.0)
    q = bump.width / 4
    assert bump.value(2 * q) == pytest.approx(bump.eps)
    assert bump.eps == pytest.approx(1.0 * 2.0 / 32)
    xs = np.linspace(-0.05, bump.width + 0.05, 2001)
    assert np.all(bump.value(xs) >= 0)
    assert np.all(bump.value(xs[(xs < 0) | (xs > bump.width)]) == 0)
    assert np.abs(bump.derivative(xs)).max() <= 2.0 + 1e-12
    # C^1 at the joins
    for knot in (q, 3 * q):
        assert bump.value(knot - 1e-12) == pytest.approx(bump.value(knot + 1e-12), abs=1e-9)
        assert bump.derivative(knot - 1e-12) == pytest.approx(bump.derivative(knot + 1e-12), abs=1e-6)
    lo, hi = bump.plateau
    assert bump.value(np.linspace(lo, hi, 11)).min() >= bump.eps / 2 - 1e-15


def test_cell_index_edges():
    edges = bump_centers(1.0, 2)
    assert edges.tolist() == [-0.5, -0.25, 0.0, 0.25, 0.5]
    cells = cell_index(np.array([-0.5, -0.3, 0.0, 0.3, 0.5, 0.6, -0.51]), 1.0, 2)
    assert cells.tolist() == [-2, -2, 0, 1, 1, OUTSIDE, OUTSIDE]


def test_beta_index_helpers():
    beta = BetaIndex.parse("0110")
    assert beta.N == 2
    assert beta.at(-2) == 0 and beta.at(-1) == 1 and beta.at(1) == 0
    assert beta.active() == (-1, 0)
    assert str(beta) == "0110"
    assert beta_ge(BetaIndex.ones(2), beta)
    assert not beta_ge(beta, BetaIndex.ones(2))
    with pytest.raises(ValueError):
        BetaIndex((0, 1, 1))


def test_random_beta_is_seeded():
    spec = RngSpec(seed=3, trial=2)
    assert random_beta(6, spec) == random_beta(6, spec)
    assert len(random_beta(6, spec).bits) == 12


def test_adversarial_gradient():
    u, Cx, N, xi = 2.0, 1.0, 4, 1.0
    beta = BetaIndex.parse("10000001")
    p = adversarial(u, Cx, N, xi, beta, ell=1.0, L=4.0)
    assert p.hessian_bounds == (1.0, 3.0)
    outside = np.array([-2.0, -0.6, 0.7, 3.0])
    assert np.allclose(p(outside), u * outside)
    plain = adversarial(u, Cx, N, xi, BetaIndex.zeros(N), ell=1.0, L=4.0)
    xs = np.linspace(-0.49, 0.49, 99)
    assert np.allclose(plain(xs), u * xs)
    bump = bump_g(Cx, N, xi)
    first = -0.5 + 2 * bump.width / 4
    assert p(np.array([first]))[0] == pytest.approx(u * first + bump.eps)


def test_adversarial_slope_within_bounds():
    p = adversarial(2.0, 1.0, 4, 1.0, BetaIndex.ones(4), ell=1.0, L=4.0)
    xs = np.linspace(-0.6, 0.6, 1201)
    slopes = _slopes(p, xs, step=1e-7)
    lo, hi = p.hessian_bounds
    assert slopes.min() >= lo - 1e-4
    assert slopes.max() <= hi + 1e-4


def test_adversarial_reads_only_the_queried_cell():
    a = adversarial(2.0, 1.0, 4, 1.0, BetaIndex.parse("11110000"), ell=1.0, L=4.0)
    b = adversarial(2.0, 1.0, 4, 1.0, BetaIndex.parse("11111111"), ell=1.0, L=4.0)
    left = np.linspace(-0.5, -0.01, 50)
    assert np.array_equal(a(left), b(left))


def test_adversarial_preconditions():
    with pytest.raises(ValueError):
        adversarial(2.0, 1.0, 4, 3.0, BetaIndex.zeros(4), ell=1.0, L=4.0)
    with pytest.raises(ValueError):
        adversarial(2.0, 1.0, 4, 1.0, BetaIndex.zeros(3), ell=1.0, L=4.0)


def test_larger_index_pushes_the_gradient_up(sample_points):
    xs = np.concatenate([sample_points, np.linspace(-0.6, 0.6, 1201)])
    lower = BetaIndex.parse("10010010")
    for upper in (BetaIndex.parse("10011010"), BetaIndex.parse("11111110"), BetaIndex.ones(4)):
        assert beta_ge(upper, lower)
        gap = adversarial(2.0, 1.0, 4, 1.0, upper, ell=1.0, L=4.0)(xs) - \
            adversarial(2.0, 1.0, 4, 1.0, lower, ell=1.0, L=4.0)(xs)
        assert gap.min() >= 0.0
        assert gap.max() > 0.0
