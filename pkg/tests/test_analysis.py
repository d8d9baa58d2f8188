import math

import numpy as np
import pytest

from langevin.analysis import (COV_ENTRIES, ClowGrid, CurvePoint, ErrorCurve, asymptotic_tail, bump_measure,
                               bumps_near_origin, cbar, check_perturbation, check_separation, check_trapping,
                               clow_search, crossing_lower_bound, dimension_scaling, epsilon_bar, estimate_P,
                               event_mask, fit_loglog, fit_order, perturbation_bounds, perturbation_scaling,
                               prefactor_check, separation_scaling, stabilized_ns, strong_error, weak_error_order,
                               weak_errors, wilson_interval)
from langevin.potentials import BetaIndex, adversarial, quadratic, smooth_nonquadratic


def _curve(ns, rmse, solver="rmm"):
    entries = tuple(CurvePoint(Ns=n, mse=r ** 2, se=0.0, trials=100) for n, r in zip(ns, rmse))
    return ErrorCurve(entries=entries, solver=solver, potential="quadratic", d=1, T=1.0, seed=0)


def test_fit_loglog_recovers_exact_power_laws():
    ns = [16, 32, 64, 128, 256]
    fit = fit_loglog(ns, [3.0 * n ** -1.5 for n in ns])
    assert fit.slope == pytest.approx(-1.5)
    assert fit.r2 == pytest.approx(1.0)
    assert fit_loglog(ns, [n ** -1.0 for n in ns]).slope == pytest.approx(-1.0)


def test_fit_order_skips_perfectly_coupled_points():
    ns = [8, 16, 32, 64, 128]
    fit = fit_order(_curve(ns, [0.0] + [n ** -1.5 for n in ns[1:]]))
    assert fit.used == (16.0, 32.0, 64.0, 128.0)
    assert fit.slope == pytest.approx(-1.5)
    with pytest.raises(ValueError):
        fit_order(_curve(ns[:3], [n ** -1.5 for n in ns[:3]]))


def test_error_curve_validation():
    with pytest.raises(ValueError):
        _curve([32, 16], [0.1, 0.2])


def test_stabilized_ns_on_clean_curve():
    ns = [16, 32, 64, 128]
    curve = _curve(ns, [n ** -1.5 for n in ns])
    assert stabilized_ns(curve, fit_order(curve)) == 16


def test_prefactor_check_reports_constant():
    ns = [16, 32, 64, 128]
    curve = _curve(ns, [0.5 * (2 * n) ** -1.5 for n in ns])
    report = prefactor_check(curve, ell=1.0, L=4.0)
    assert report["empirical_constant"] == pytest.approx(0.5)
    assert report["pass"]


def test_strong_error_of_exact_solver_is_zero(rng):
    curve = strong_error("exact", quadratic(1.0, L=4.0), [4, 8], trials=4, T=1.0, rng=rng)
    assert all(e.mse == 0.0 for e in curve.entries)


def test_strong_error_orders(rng):
    p = quadratic(1.0, L=4.0)
    ns = [16, 32, 64, 128]
    rmm = fit_order(strong_error("rmm", p, ns, trials=200, T=1.0, rng=rng))
    em = fit_order(strong_error("em", p, ns, trials=200, T=1.0, rng=rng))
    assert -1.75 <= rmm.slope <= -1.25
    assert -1.25 <= em.slope <= -0.75
    assert rmm.slope <= em.slope - 0.3


def test_strong_error_is_worker_independent(rng):
    p = quadratic(1.0, L=4.0)
    serial = strong_error("rmm", p, [4, 8], trials=6, T=1.0, rng=rng, workers=1)
    threaded = strong_error("rmm", p, [4, 8], trials=6, T=1.0, rng=rng, workers=3)
    assert serial.entries == threaded.entries


def test_weak_error_rows():
    rows = weak_errors(1.0, 4.0, 1.0, [0.25, 0.125])
    assert [r["Ns"] for r in rows] == [4, 8]
    assert rows[1]["cov_xx"] < rows[0]["cov_xx"]
    with pytest.raises(ValueError):
        weak_errors(1.0, 4.0, 1.0, [0.3])


def test_bounds_and_constants():
    eps_bar = epsilon_bar(0.25, 8.0, 2.0, 4.0)
    s = math.sqrt(0.5)
    assert eps_bar == pytest.approx(min(2 * 4 * (1 - s) * s * 0.25, 4 * s * 8 / 2))
    bx, bv = perturbation_bounds(0.01, 2.0, 4.0)
    assert bx > 0 and bv > 0
    # the u_R = L branch is the limit of the general formula
    assert cbar(0.25, 8.0, 4.0 * (1 - 1e-8), 4.0, 1.0) == pytest.approx(cbar(0.25, 8.0, 4.0, 4.0, 1.0), rel=1e-3)
    assert bump_measure(3, 1.0, 6) == pytest.approx(0.125)


def test_wilson_interval():
    low, high = wilson_interval(0, 100)
    assert low == 0.0 and 0.0 < high < 0.05
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high


def test_event_mask():
    times = 5
    xs = np.zeros((times, 2))
    vs = np.zeros((times, 2))
    xs[1, 0], xs[4, 0] = -3.0, 3.0
    vs[:, 0] = 1.0
    mask = event_mask(xs, vs, 1.0, 2.0)
    assert mask.tolist() == [True, False]


def test_infeasible_event_has_no_hits(rng):
    # 12 Cx / Cv = 120 > T
    est = estimate_P(1.0, 0.1, 2.0, 4.0, 1.0, trials=500, Ns_fine=128, rng=rng)
    assert est.hits == 0
    assert est.estimate == 0.0
    assert est.ci[0] == 0.0


def test_crossing_lower_bound_is_a_probability():
    value = crossing_lower_bound(0.1, 2.0, 4.0, 2.0)
    assert 0.0 < value < 1.0
    assert crossing_lower_bound(0.2, 2.0, 4.0, 2.0) < value


def test_perturbation_bound_holds(rng):
    betas = [BetaIndex.ones(4), BetaIndex.parse("10100101")]
    report = check_perturbation(2.0, 4.0, 1.0, 0.25, 4, 1.0, betas, trials=8, Ns_fine=256, rng=rng, ell=1.0)
    assert report.passed
    assert report.as_check()["detail"]["trials"] == 8


def test_trapping_region_holds(rng):
    upper = adversarial(2.0, 0.25, 4, 1.0, BetaIndex.ones(4), ell=1.0, L=4.0)
    lower = adversarial(2.0, 0.25, 4, 1.0, BetaIndex.parse("01100010"), ell=1.0, L=4.0)
    report = check_trapping(upper, lower, 1.0, trials=8, Ns_fine=256, rng=rng)
    assert report.passed
    with pytest.raises(ValueError):
        check_trapping(lower, upper, 1.0, trials=2, Ns_fine=64, rng=rng)


# ---------------------------
# Weak order
# ---------------------------
WEAK_LADDER = [2.0 ** -k for k in range(3, 9)]


@pytest.mark.parametrize("u", [1.0, 2.0])
def test_weak_error_order_is_third_order_on_every_moment(u):
    fit = weak_error_order(u, 4.0, 1.0, WEAK_LADDER)
    assert fit.slope >= 2.7
    assert fit.label in COV_ENTRIES
    assert len(fit.used) >= 3


def test_weak_errors_shrink_along_the_ladder():
    rows = weak_errors(2.0, 4.0, 1.0, WEAK_LADDER)
    assert all(row["mean"] == 0.0 for row in rows)
    for name in COV_ENTRIES:
        errs = [row[name] for row in rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))


def test_asymptotic_tail_drops_preasymptotic_steps():
    hs = [2.0 ** -k for k in range(3, 9)]
    errs = [1.0, 0.5]
    for _ in range(4):
        errs.append(errs[-1] / 8)
    assert asymptotic_tail(hs, errs) == 1
    # a lone steep final segment still keeps three points
    flat = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.0625 / 8]
    assert asymptotic_tail(hs, flat) == 3
    assert asymptotic_tail(hs[:3], errs[:3]) == 0


def test_stabilized_ns_skips_preasymptotic_start():
    ns = [8, 16, 32, 64, 128]
    rmse = [0.1, 0.1 * 2 ** -0.5]
    for _ in range(3):
        rmse.append(rmse[-1] * 2 ** -1.5)
    curve = _curve(ns, rmse)
    assert stabilized_ns(curve, fit_loglog(ns[1:], rmse[1:])) == 16
    assert stabilized_ns(_curve(ns[:1], rmse[:1]), fit_loglog(ns[1:], rmse[1:])) is None


# ---------------------------
# Dimension scaling and self-convergence
# ---------------------------
def test_dimension_scaling_tracks_sqrt_d(rng):
    points = dimension_scaling("rmm", 1.0, 4.0, 8, [1, 4], trials=400, T=1.0, rng=rng)
    assert [p.d for p in points] == [1, 4]
    assert points[0].ratio == pytest.approx(1.0)
    assert 1.6 <= points[1].ratio <= 2.4
    assert points[1].rmse > points[0].rmse


def test_smooth_target_self_convergence_order(rng):
    curve = strong_error("rmm", smooth_nonquadratic(1.0, 4.0), [16, 32, 64, 128], trials=100, T=1.0, rng=rng,
                         reference_ratio=32)
    assert curve.floor > 0
    fit = fit_order(curve)
    assert -1.85 <= fit.slope <= -1.15


# ---------------------------
# Crossing probability and C_low
# ---------------------------
def test_probability_is_monotone_in_velocity_bound(rng):
    tight = estimate_P(0.02, 0.5, 2.5, 4.0, 1.0, trials=256, Ns_fine=256, rng=rng)
    loose = estimate_P(0.02, 8.0, 2.5, 4.0, 1.0, trials=256, Ns_fine=256, rng=rng)
    # same paths, and the event only relaxes as Cv grows
    assert set(tight.hit_paths) <= set(loose.hit_paths)
    assert loose.hits > 0


def test_clow_search_finds_a_positive_point(rng):
    grid = ClowGrid(cx=(0.02, 0.05), cv=(8.0,), u=(2.5,), u_r=(4.0,))
    result = clow_search(1.0, 4.0, 1.0, grid, trials=512, Ns_fine=256, rng=rng)
    assert len(result.rows) == 2
    assert result.value > 0
    assert result.ci[0] > 0
    assert result.argmax["P_low"] > 0
    assert result.argmax["Cx"] in (0.02, 0.05)


def test_clow_search_reports_zero_on_infeasible_grid(rng):
    grid = ClowGrid(cx=(1.0,), cv=(0.1,), u=(2.0,), u_r=(4.0,))
    result = clow_search(1.0, 4.0, 1.0, grid, trials=64, Ns_fine=128, rng=rng)
    assert result.value == 0.0
    assert result.argmax is None
    with pytest.raises(ValueError):
        clow_search(1.0, 4.0, 1.0, ClowGrid(cx=(0.1,), cv=(8.0,), u=(0.5,), u_r=(4.0,)), trials=8, Ns_fine=64,
                    rng=rng)


# ---------------------------
# Pathwise invariants on exercised paths
# ---------------------------
def test_identical_potentials_do_not_perturb(rng):
    report = check_perturbation(2.0, 4.0, 1.0, 0.25, 4, 1.0, [BetaIndex.zeros(4)], trials=2, Ns_fine=128, rng=rng,
                                ell=1.0)
    assert report.detail["max_dx"] == 0.0
    assert report.detail["max_dv"] == 0.0


def test_perturbation_scales_linearly_in_eps(rng):
    fit, rows = perturbation_scaling(2.0, 4.0, 1.0, 0.25, 1.0, [4, 8, 16], trials=12, Ns_fine=256, rng=rng)
    assert [r["N"] for r in rows] == [4, 8, 16]
    assert rows[0]["eps"] > rows[1]["eps"] > rows[2]["eps"]
    assert 0.7 <= fit.slope <= 1.3


def test_trapping_is_exercised_near_the_bumps(rng):
    upper = adversarial(2.0, 0.02, 4, 1.0, BetaIndex.ones(4), ell=1.0, L=4.0)
    lower = adversarial(2.0, 0.02, 4, 1.0, BetaIndex.parse("01100010"), ell=1.0, L=4.0)
    report = check_trapping(upper, lower, 1.0, trials=6, Ns_fine=256, rng=rng)
    assert report.detail["min_dx"] < 0
    assert report.passed


def test_separation_holds_on_event_paths(rng):
    report = check_separation(2.0, 4.0, 4.0, 0.02, 8.0, 1.0, 4, BetaIndex.zeros(4), bumps_near_origin(4, 4), 1.0,
                              trials=200, Ns_fine=256, rng=rng, ell=1.0)
    assert report.detail["hits"] > 0
    assert report.detail["quadratic_hits"] >= report.detail["hits"]
    assert not report.inconclusive
    assert report.passed
    assert report.detail["min_margin"] >= 0.9


def test_separation_grows_with_the_number_of_bumps(rng):
    fit, rows = separation_scaling(2.0, 4.0, 4.0, 0.02, 8.0, 1.0, 4, [1, 2, 4, 8], 1.0, trials=40, Ns_fine=256,
                                   rng=rng)
    gaps = [r["mean_gap"] for r in rows]
    assert all(b >= a for a, b in zip(gaps, gaps[1:]))
    # inner cells carry the early-time occupation, so growth is sublinear but not flat
    assert 0.5 <= fit.slope <= 1.2


def test_separation_rejects_unordered_indices(rng):
    with pytest.raises(ValueError):
        check_separation(2.0, 4.0, 4.0, 0.02, 8.0, 1.0, 4, bumps_near_origin(4, 2), BetaIndex.zeros(4), 1.0,
                         trials=2, Ns_fine=64, rng=rng)
