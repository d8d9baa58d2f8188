"""Strong and weak error curves on coupled noise, and log-log order fits."""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from langevin.dynamics import (EXACT, RMM, SOLVERS, exact_covariance, moment_propagate_rmm_quadratic,
                               quadratic_exponents, reference_solution, run_solver)
from langevin.noise import ExponentSet, merge_grids, plan_grid, sample_noise
from langevin.potentials import Potential, quadratic, separable
from utils.parallel import map_trials
from utils.rng import RngSpec, draw_midpoints

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4
FLOOR_FRACTION = 0.01
# local slopes of a weak-error curve count as asymptotic within this band of the finest one
ASYMPTOTIC_BAND = 0.25
REFERENCE_SUBSTREAM = 0


@dataclass(frozen=True)
class CurvePoint:
    Ns: int
    mse: float
    se: float
    trials: int

    @property
    def rmse(self) -> float:
        return math.sqrt(self.mse)


@dataclass(frozen=True)
class ErrorCurve:
    entries: Tuple[CurvePoint, ...]
    solver: str
    potential: str
    d: int
    T: float
    seed: int
    floor: float = 0.0  # estimated rmse of the reference itself

    def __post_init__(self):
        ns = [e.Ns for e in self.entries]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError(f"Ns must be strictly increasing, got {ns}")
        for e in self.entries:
            if e.mse < 0:
                raise ValueError(f"negative mse at Ns={e.Ns}")
            if e.trials < 2:
                raise ValueError(f"need at least 2 trials, got {e.trials} at Ns={e.Ns}")

    @property
    def ns(self) -> List[int]:
        return [e.Ns for e in self.entries]

    @property
    def rmse(self) -> np.ndarray:
        return np.array([e.rmse for e in self.entries])


@dataclass(frozen=True)
class OrderFit:
    slope: float
    intercept: float
    r2: float
    slope_se: float
    residuals: Tuple[float, ...]
    used: Tuple[float, ...] = ()
    label: str = ""


def fit_loglog(xs: Sequence[float], ys: Sequence[float], label: str = "") -> OrderFit:
    """Least squares of log y against log x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        raise ValueError(f"need at least 2 points to fit a slope, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    result = stats.linregress(lx, ly)
    residuals = ly - (result.intercept + result.slope * lx)
    slope_se = float(result.stderr) if xs.size > 2 else 0.0
    r2 = min(1.0, max(0.0, float(result.rvalue) ** 2))
    return OrderFit(slope=float(result.slope), intercept=float(result.intercept), r2=r2, slope_se=slope_se,
                    residuals=tuple(float(r) for r in residuals), used=tuple(float(x) for x in xs), label=label)


def fit_order(curve: ErrorCurve) -> OrderFit:
    """Slope of log rmse against log Ns, skipping perfectly coupled points and points below the reference floor."""
    xs, ys = [], []
    for e in curve.entries:
        if e.mse == 0.0:
            logger.warning(f"Excluding Ns={e.Ns} from the fit: zero error (perfect coupling)")
            continue
        if curve.floor > FLOOR_FRACTION * e.rmse:
            logger.warning(f"Excluding Ns={e.Ns} from the fit: reference floor {curve.floor:.3e} vs rmse {e.rmse:.3e}")
            continue
        xs.append(e.Ns)
        ys.append(e.rmse)
    if len(xs) < MIN_FIT_POINTS:
        raise ValueError(f"need at least {MIN_FIT_POINTS} usable curve entries, got {len(xs)}")
    return fit_loglog(xs, ys, label=f"{curve.solver}:{curve.potential}")


def stabilized_ns(curve: ErrorCurve, fit: OrderFit, tolerance: float = 0.15) -> Optional[int]:
    """Smallest Ns from which every successive local slope stays within tolerance of the fitted slope."""
    entries = [e for e in curve.entries if e.mse > 0]
    if len(entries) < 2:
        return None
    local = [math.log(b.rmse / a.rmse) / math.log(b.Ns / a.Ns) for a, b in zip(entries, entries[1:])]
    start = None
    for i in range(len(local) - 1, -1, -1):
        if abs(local[i] - fit.slope) > tolerance:
            break
        start = entries[i].Ns
    return start


def reference_steps(Ns_list: Sequence[int], ratio: int) -> int:
    """Fine step count for a non-quadratic reference; a multiple of every coarse Ns."""
    base = max(Ns_list) * ratio
    if all(base % n == 0 for n in Ns_list):
        return base
    return math.lcm(*Ns_list) * ratio


def _trial_errors(solver: str, p: Potential, Ns_list: Sequence[int], T: float, spec: RngSpec, ratio: int) -> np.ndarray:
    etas = {}
    if solver == RMM:
        etas = {n: draw_midpoints(spec, n, substream=n) for n in Ns_list}
    grids = [plan_grid(n, T, etas.get(n)) for n in Ns_list]
    thetas = ExponentSet.of()
    eta_ref = None
    Ns_ref = 0
    if p.is_quadratic:
        thetas = ExponentSet.of(*quadratic_exponents(p.curvatures, p.L))
    else:
        Ns_ref = reference_steps(Ns_list, ratio)
        eta_ref = draw_midpoints(spec, Ns_ref, substream=REFERENCE_SUBSTREAM)
        grids.append(plan_grid(Ns_ref, T, eta_ref))
    nr = sample_noise(merge_grids(*grids), p.d, thetas, spec)
    ref = reference_solution(p, nr, Ns_ref, T, eta=eta_ref)
    out = np.empty(len(Ns_list))
    for i, n in enumerate(Ns_list):
        run = run_solver(solver, p, n, T, nr, eta=etas.get(n))
        out[i] = float(np.sum((run.final.x - ref.x) ** 2))
    return out


def strong_error(solver: str, p: Potential, Ns_list: Sequence[int], trials: int, T: float, rng: RngSpec,
                 workers: int = 1, reference_ratio: int = 64) -> ErrorCurve:
    """Mean-square error of X_T against the coupled reference, one shared noise realization per trial."""
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}")
    Ns_list = [int(n) for n in Ns_list]
    if any(b <= a for a, b in zip(Ns_list, Ns_list[1:])):
        raise ValueError(f"Ns list must be strictly increasing, got {Ns_list}")
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if trials < 100:
        logger.warning(f"Only {trials} trials; confidence intervals will be rough")
    if solver == EXACT and not p.is_quadratic:
        raise ValueError("the exact solver only handles quadratic potentials")

    logger.info(f"Strong error: {solver} on {p.label}, d={p.d}, Ns={Ns_list}, {trials} trials")
    rows = map_trials(lambda t: _trial_errors(solver, p, Ns_list, T, rng.for_trial(t), reference_ratio),
                      range(trials), workers)
    errors = np.vstack(rows)
    mse = errors.mean(axis=0)
    se = errors.std(axis=0, ddof=1) / math.sqrt(trials)
    entries = tuple(CurvePoint(Ns=n, mse=float(m), se=float(s), trials=trials) for n, m, s in zip(Ns_list, mse, se))

    floor = 0.0
    if not p.is_quadratic and solver == RMM:
        Ns_ref = reference_steps(Ns_list, reference_ratio)
        floor = entries[-1].rmse * (Ns_list[-1] / Ns_ref) ** 1.5
    return ErrorCurve(entries=entries, solver=solver, potential=p.label, d=p.d, T=T, seed=rng.seed, floor=floor)


@dataclass(frozen=True)
class DimensionPoint:
    d: int
    rmse: float
    rmse_se: float
    ratio: float
    ratio_se: float


def dimension_scaling(solver: str, ell: float, L: float, Ns: int, d_list: Sequence[int], trials: int,
                      T: float, rng: RngSpec, workers: int = 1) -> List[DimensionPoint]:
    """rmse at a fixed step count on separable quadratics of growing dimension; ratios to d=1 track sqrt(d)."""
    u = (ell + L) / 2
    component = quadratic(u, 1, ell=ell, L=L)
    measured = []
    for d in d_list:
        curve = strong_error(solver, separable([component] * d), [Ns], trials, T, rng, workers=workers)
        point = curve.entries[0]
        rmse = point.rmse
        measured.append((d, rmse, point.se / (2 * rmse) if rmse > 0 else 0.0))
    base_d, base, base_se = measured[0]
    out = []
    for d, rmse, rmse_se in measured:
        ratio = rmse / base * math.sqrt(base_d)
        ratio_se = ratio * math.hypot(rmse_se / rmse, base_se / base) if rmse > 0 else 0.0
        out.append(DimensionPoint(d=d, rmse=rmse, rmse_se=rmse_se, ratio=ratio, ratio_se=ratio_se))
        logger.info(f"d={d}: rmse={rmse:.4e}, ratio={ratio:.3f} (sqrt(d)={math.sqrt(d):.3f})")
    return out


COV_ENTRIES = {"cov_xx": (0, 0), "cov_xv": (0, 1), "cov_vv": (1, 1)}


def weak_errors(u: float, L: float, T: float, h_list: Sequence[float], quadrature: int = 16) -> List[Dict[str, float]]:
    """Moment errors of the midpoint scheme against the exact transient law, one row per step size."""
    exact = exact_covariance(u, L, T)
    rows = []
    for h in h_list:
        Ns = int(round(T / h))
        if Ns < 1 or abs(Ns * h - T) > 1e-12 * T:
            raise ValueError(f"step size {h} does not divide T={T}")
        state = moment_propagate_rmm_quadratic(u, L, h, Ns, quadrature)
        row = {"h": float(h), "Ns": Ns, "mean": float(np.abs(state.mean).max())}
        for name, (i, j) in COV_ENTRIES.items():
            row[name] = float(abs(state.cov[i, j] - exact[i, j]))
        rows.append(row)
    return rows


def asymptotic_tail(hs: Sequence[float], errs: Sequence[float], band: float = ASYMPTOTIC_BAND,
                    min_points: int = 3) -> int:
    """Index of the coarsest step from which every local slope is within band of the finest local slope.

    hs must be decreasing. At least min_points of the finest steps are always kept.
    """
    n = len(hs)
    if n <= min_points:
        return 0
    local = [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(n - 1)]
    start = n - 2
    while start > 0 and abs(local[start - 1] - local[-1]) <= band:
        start -= 1
    return min(start, n - min_points)


def weak_error_order(u: float, L: float, T: float, h_list: Sequence[float], quadrature: int = 16) -> OrderFit:
    """Worst (shallowest) log-log slope among the covariance entries' errors against h.

    Each entry is fitted over its asymptotic tail; coarser steps still in the pre-asymptotic
    regime are dropped with a warning.
    """
    rows = []
    for row in weak_errors(u, L, T, h_list, quadrature):
        errs = [row[name] for name in COV_ENTRIES]
        if not all(np.isfinite(errs)) or max(errs) > 1.0:
            logger.warning(f"Excluding h={row['h']}: moment recursion is unstable there")
            continue
        rows.append(row)
    fits = []
    for name in COV_ENTRIES:
        usable = [(r["h"], r[name]) for r in rows if r[name] > 0]
        if len(usable) < 2:
            logger.warning(f"Entry {name} has fewer than 2 nonzero errors; skipped")
            continue
        hs, errs = zip(*usable)
        start = asymptotic_tail(hs, errs)
        if start:
            logger.warning(f"Entry {name}: h >= {hs[start - 1]:g} is pre-asymptotic; fitting h <= {hs[start]:g}")
        fits.append(fit_loglog(hs[start:], errs[start:], label=name))
    if not fits:
        raise ValueError("no covariance entry has enough nonzero errors to fit")
    return min(fits, key=lambda f: f.slope)


def c_up(T: float, ell: float, L: float) -> float:
    return math.sqrt(T ** 3 / ell + T ** 4 / L)


def prefactor_check(curve: ErrorCurve, ell: float, L: float, safety: float = 10.0) -> Dict[str, float]:
    """rmse(Ns) against safety * C_up * sqrt(d) * (2 Ns)^(-3/2); also reports the empirical constant."""
    bound = c_up(curve.T, ell, L)
    constants = [e.rmse / (math.sqrt(curve.d) * (2 * e.Ns) ** -1.5) for e in curve.entries]
    empirical = max(constants) if constants else 0.0
    return {"c_up": bound, "empirical_constant": empirical, "safety": safety,
            "pass": bool(empirical <= safety * bound)}
