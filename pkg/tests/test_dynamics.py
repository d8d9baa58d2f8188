import numpy as np
import pytest
from scipy.linalg import expm

from langevin.dynamics import (EM, RMM, MomentState, decay_rates, em_integrate, exact_covariance, exact_quadratic,
                               moment_propagate_rmm_quadratic, quadratic_exponents, reference_solution,
                               replay_gradients, rmm_integrate, run_solver, semigroup, stationary_covariance,
                               x_variance_oracle)
from langevin.noise import ExponentSet, GridError, plan_grid, sample_noise, weighted_integral, zero_noise
from langevin.potentials import quadratic, smooth_nonquadratic
from utils.rng import draw_midpoints


def _generator(u, L):
    return np.array([[0.0, 1.0], [-u / L, -2.0]])


def test_decay_rates():
    assert decay_rates(3.0, 4.0) == pytest.approx((0.5, 1.5))


@pytest.mark.parametrize("u", [0.5, 1.0, 3.0, 4.0])
def test_semigroup_matches_matrix_exponential(u):
    for t in (0.0, 0.1, 1.0, 3.0):
        assert np.allclose(semigroup(u, 4.0, t), expm(_generator(u, 4.0) * t), atol=1e-12)


@pytest.mark.parametrize("u", [1.0, 4.0])
def test_semigroup_composes(u):
    for s, t in ((0.3, 0.5), (1.0, 2.5)):
        assert np.allclose(semigroup(u, 4.0, s) @ semigroup(u, 4.0, t), semigroup(u, 4.0, s + t), atol=1e-12)


def test_semigroup_rejects_bad_input():
    with pytest.raises(ValueError):
        semigroup(5.0, 4.0, 1.0)
    with pytest.raises(ValueError):
        semigroup(1.0, 4.0, -1.0)


def test_covariance_oracles_agree():
    cov = exact_covariance(1.0, 4.0, 1.0)
    assert cov[0, 0] == pytest.approx(x_variance_oracle(1.0, 4.0, 1.0), rel=1e-8)
    assert np.allclose(exact_covariance(1.0, 4.0, 150.0), stationary_covariance(1.0, 4.0), atol=1e-7)


def test_solvers_stay_at_rest_without_noise():
    p = quadratic(1.0, d=2, L=4.0)
    eta = np.full(8, 0.5)
    grid = plan_grid(8, 1.0, eta)
    nr = zero_noise(grid, 2, ExponentSet.of(*quadratic_exponents(1.0, 4.0)))
    for solver in (EM, RMM, "exact"):
        run = run_solver(solver, p, 8, 1.0, nr, eta=eta)
        assert np.array_equal(run.final.x, np.zeros(2))
        assert np.array_equal(run.final.v, np.zeros(2))


def test_exact_solver_rejects_degenerate_curvature(uniform_noise):
    nr = uniform_noise(Ns=4)
    with pytest.raises(ValueError):
        exact_quadratic(4.0, 4.0, 1.0, nr)


def test_exact_solver_variance_matches_oracle(rng):
    # independent paths ride in the components of one wide realization
    n = 20000
    grid = plan_grid(8, 1.0)
    nr = sample_noise(grid, n, ExponentSet.of(*quadratic_exponents(1.0, 4.0)), rng)
    xs = exact_quadratic(1.0, 4.0, 1.0, nr).final.x
    target = x_variance_oracle(1.0, 4.0, 1.0)
    assert abs(xs.var() - target) < 5 * target * np.sqrt(2.0 / n)


def test_exact_trajectory_visits_every_grid_point(rng):
    coarse = plan_grid(4, 1.0)
    fine = plan_grid(4, 1.0, [0.3, 0.7, 0.1, 0.9])
    thetas = ExponentSet.of(*quadratic_exponents(1.0, 4.0))
    nr = sample_noise(fine, 1, thetas, rng)
    run = exact_quadratic(1.0, 4.0, 1.0, nr, keep_trajectory=True)
    nodes = [i for i, t in enumerate(run.trajectory.times) if coarse.contains(t)]
    assert len(nodes) == 5
    assert run.trajectory.times[-1] == 1.0


def test_query_traces(uniform_noise, rng):
    p = quadratic(1.0, L=4.0)
    eta = draw_midpoints(rng, 8)
    nr = uniform_noise(Ns=8, eta=eta)
    em = em_integrate(p, 8, 1.0, nr)
    assert em.evaluations == 8
    assert np.allclose(em.query_times(), np.arange(8) / 8)
    rmm = rmm_integrate(p, 8, 1.0, nr, eta)
    assert rmm.evaluations == 16
    times = rmm.query_times()
    assert np.allclose(times[0::2], (np.arange(8) + eta) / 8)
    assert np.allclose(times[1::2], (np.arange(8) + 1) / 8)
    assert np.allclose(replay_gradients(rmm.query_trace, p), rmm.query_points())


def test_rmm_needs_midpoints_on_grid(uniform_noise):
    p = quadratic(1.0, L=4.0)
    nr = uniform_noise(Ns=4)
    with pytest.raises(GridError):
        rmm_integrate(p, 4, 1.0, nr, [0.3, 0.3, 0.3, 0.3])
    with pytest.raises(ValueError):
        rmm_integrate(p, 4, 1.0, nr, [0.5, 0.5])


def test_fine_solvers_track_the_exact_path(uniform_noise, rng):
    Ns = 256
    eta = draw_midpoints(rng, Ns)
    nr = uniform_noise(Ns=Ns, eta=eta, extra=quadratic_exponents(1.0, 4.0))
    p = quadratic(1.0, L=4.0)
    exact = exact_quadratic(1.0, 4.0, 1.0, nr).final.x
    assert abs(rmm_integrate(p, Ns, 1.0, nr, eta).final.x - exact)[0] < 5e-3
    assert abs(em_integrate(p, Ns, 1.0, nr).final.x - exact)[0] < 5e-2


def test_reference_solution_dispatch(uniform_noise, rng):
    eta = draw_midpoints(rng, 16)
    nr = uniform_noise(Ns=16, eta=eta, extra=quadratic_exponents(1.0, 4.0))
    ref = reference_solution(quadratic(1.0, L=4.0), nr, 16, 1.0)
    assert np.array_equal(ref.x, exact_quadratic(1.0, 4.0, 1.0, nr).final.x)
    with pytest.raises(ValueError):
        reference_solution(smooth_nonquadratic(1.0, 4.0), nr, 16, 1.0)


def test_moment_oracle_tracks_the_exact_law():
    exact = exact_covariance(1.0, 4.0, 1.0)
    errors = []
    for h in (2 ** -3, 2 ** -4, 2 ** -5):
        state = moment_propagate_rmm_quadratic(1.0, 4.0, h, int(round(1.0 / h)))
        assert np.allclose(state.mean, 0.0)
        assert state.min_eigenvalue() > 0
        errors.append(np.abs(state.cov - exact).max())
    assert errors[1] < errors[0] / 4
    assert errors[2] < errors[1] / 4


def test_moment_oracle_edge_cases():
    assert np.array_equal(moment_propagate_rmm_quadratic(1.0, 4.0, 0.1, 0).cov, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        moment_propagate_rmm_quadratic(1.0, 4.0, 0.1, 4, quadrature=4)
    with pytest.raises(ValueError):
        MomentState(mean=np.zeros(2), cov=np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_exact_solver_matches_closed_form_on_refined_grid(rng):
    # stepping through every subinterval composes to the one-shot weighted integrals over [0, T]
    u, L, T = 1.0, 4.0, 1.0
    lam_minus, lam_plus = decay_rates(u, L)
    grid = plan_grid(8, T, np.linspace(0.1, 0.9, 8))
    nr = sample_noise(grid, 3, ExponentSet.of(lam_minus, lam_plus), rng)
    x = exact_quadratic(u, L, T, nr).final.x
    closed = 2 / np.sqrt(L) / (lam_plus - lam_minus) * (
        weighted_integral(nr, 0.0, T, lam_minus, T) - weighted_integral(nr, 0.0, T, lam_plus, T))
    assert np.allclose(x, closed, rtol=0, atol=1e-10)
