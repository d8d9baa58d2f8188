import asyncio
import logging
import math

from config import REFERENCE_RATIO
from langevin.analysis import (COV_ENTRIES, dimension_scaling, fit_order, prefactor_check, stabilized_ns,
                               strong_error, weak_error_order, weak_errors)
from langevin.dynamics import EM, EXACT, RMM
from utils.artifacts import ExperimentOutcome
from utils.decorators import experiment_handler, require_solver
from utils.experiment_config import ExperimentConfig
from utils.helpers import parse_potential
from utils.rng import RngSpec

logger = logging.getLogger(__name__)

# Accepted fitted slopes of log rmse against log Ns
ORDER_WINDOWS = {EM: (-1.15, -0.85), RMM: (-1.65, -1.35)}
MIN_R2 = 0.98
EXACT_TOLERANCE = 1e-24
DIMENSION_TOLERANCE = 0.12
WEAK_MIN_SLOPE = 2.7


# ---------------------------
# Strong Convergence Command Handler
# ---------------------------
@experiment_handler
async def converge_command(config: ExperimentConfig) -> ExperimentOutcome:
    p = parse_potential(config.potential)
    curve = await asyncio.to_thread(strong_error, config.solver, p, config.ns, config.trials, config.T,
                                    RngSpec(config.seed), config.workers, REFERENCE_RATIO)
    base = {"solver": config.solver, "potential": p.label, "d": p.d, "T": config.T, "trials": config.trials}
    rows = [dict(base, Ns=e.Ns, mse=e.mse, se=e.se, metric="rmse", value=e.rmse) for e in curve.entries]
    outcome = ExperimentOutcome(rows=rows)
    outcome.results = {"curve": [{"Ns": e.Ns, "mse": e.mse, "se": e.se, "rmse": e.rmse} for e in curve.entries],
                       "reference_floor": curve.floor}

    if config.solver == EXACT:
        worst = max(e.mse for e in curve.entries)
        outcome.checks.append({"name": "pathwise_exact", "pass": worst <= EXACT_TOLERANCE,
                               "detail": {"max_mse": worst, "tolerance": EXACT_TOLERANCE}})
        return outcome

    fit = fit_order(curve)
    stable = stabilized_ns(curve, fit)
    rows.append(dict(base, slope=fit.slope, slope_se=fit.slope_se, metric="r2", value=fit.r2))
    outcome.results.update(slope=fit.slope, slope_se=fit.slope_se, intercept=fit.intercept, r2=fit.r2,
                           fitted_ns=list(fit.used), stabilized_ns=stable)
    low, high = ORDER_WINDOWS[config.solver]
    logger.info(f"{config.solver} slope {fit.slope:.3f} +/- {fit.slope_se:.3f} (window [{low}, {high}])")
    outcome.checks.append({"name": "strong_order", "pass": low <= fit.slope <= high,
                           "detail": {"slope": fit.slope, "window": [low, high]}})
    outcome.checks.append({"name": "fit_quality", "pass": fit.r2 >= MIN_R2, "detail": {"r2": fit.r2, "min": MIN_R2}})
    if config.solver == RMM:
        prefactor = prefactor_check(curve, p.ell, p.L)
        outcome.results["prefactor"] = prefactor
        outcome.checks.append({"name": "prefactor", "pass": prefactor.pop("pass"), "detail": prefactor})
    return outcome


# ---------------------------
# Dimension Scaling Command Handler
# ---------------------------
@experiment_handler
@require_solver(EM, RMM)
async def dimscale_command(config: ExperimentConfig) -> ExperimentOutcome:
    Ns = config.ns[0]
    if len(config.ns) > 1:
        logger.warning(f"dimscale uses a single step count; taking Ns={Ns}")
    points = await asyncio.to_thread(dimension_scaling, config.solver, config.ell, config.L, Ns, config.d,
                                     config.trials, config.T, RngSpec(config.seed), config.workers)
    label = f"separable:u={(config.ell + config.L) / 2:g},L={config.L:g}"
    outcome = ExperimentOutcome()
    worst = 0.0
    for point in points:
        deviation = abs(point.ratio / math.sqrt(point.d) - 1)
        worst = max(worst, deviation)
        outcome.rows.append({"solver": config.solver, "potential": label, "d": point.d, "Ns": Ns, "T": config.T,
                             "trials": config.trials, "mse": point.rmse ** 2, "metric": "ratio", "value": point.ratio})
    outcome.results = {"points": [vars(point) for point in points]}
    outcome.checks.append({"name": "sqrt_d_scaling", "pass": worst <= DIMENSION_TOLERANCE,
                           "detail": {"max_relative_deviation": worst, "tolerance": DIMENSION_TOLERANCE}})
    return outcome


# ---------------------------
# Weak Order Command Handler
# ---------------------------
@experiment_handler
async def weak_command(config: ExperimentConfig) -> ExperimentOutcome:
    table = await asyncio.to_thread(weak_errors, config.u, config.L, config.T, config.h)
    fit = await asyncio.to_thread(weak_error_order, config.u, config.L, config.T, config.h)
    label = f"quadratic:u={config.u:g},L={config.L:g}"
    outcome = ExperimentOutcome()
    for row in table:
        for name in ("mean",) + tuple(COV_ENTRIES):
            outcome.rows.append({"solver": RMM, "potential": label, "d": 1, "Ns": row["Ns"], "T": config.T,
                                 "metric": name, "value": row[name]})
    outcome.rows.append({"solver": RMM, "potential": label, "d": 1, "T": config.T, "slope": fit.slope,
                         "slope_se": fit.slope_se, "metric": f"worst_slope:{fit.label}", "value": fit.r2})
    outcome.results = {"table": table, "worst_entry": fit.label, "slope": fit.slope, "r2": fit.r2,
                       "fitted_h": list(fit.used)}
    outcome.checks.append({"name": "weak_order", "pass": fit.slope >= WEAK_MIN_SLOPE,
                           "detail": {"slope": fit.slope, "entry": fit.label, "min": WEAK_MIN_SLOPE}})
    return outcome
