"""The crossing probability P and the C_low grid search built on it."""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import stats

from langevin.dynamics import exact_covariance, exact_quadratic, quadratic_exponents, semigroup
from langevin.noise import ExponentSet, plan_grid, sample_noise
from utils.parallel import map_trials
from utils.rng import RngSpec
from .bounds import cbar

logger = logging.getLogger(__name__)

MIN_FINE_STEPS = 1 << 10
DEFAULT_BATCH = 256


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= hits <= trials:
        raise ValueError(f"hits={hits} outside [0, {trials}]")
    z = stats.norm.ppf(0.5 + confidence / 2)
    p = hits / trials
    denom = 1 + z ** 2 / trials
    center = (p + z ** 2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z ** 2 / (4 * trials ** 2)) / denom
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class EventEstimate:
    Cx: float
    Cv: float
    u: float
    L: float
    T: float
    trials: int
    hits: int
    ci: Tuple[float, float]
    hit_paths: Tuple[Tuple[int, int], ...] = ()  # (batch index, column) of each hit
    Ns_fine: int = 0

    def __post_init__(self):
        if self.hits > self.trials:
            raise ValueError("hit count exceeds trials")

    @property
    def estimate(self) -> float:
        return self.hits / self.trials


def event_mask(xs: np.ndarray, vs: np.ndarray, Cx: float, Cv: float) -> np.ndarray:
    """Paths (columns) with sup X >= 2Cx, inf X <= -2Cx and sup |V| <= Cv/2 over the sampled nodes."""
    return (xs.max(axis=0) >= 2 * Cx) & (xs.min(axis=0) <= -2 * Cx) & (np.abs(vs).max(axis=0) <= Cv / 2)


def _batch_hits(Cx, Cv, u, L, T, Ns_fine, spec: RngSpec, width: int) -> np.ndarray:
    grid = plan_grid(Ns_fine, T)
    thetas = ExponentSet.of(*quadratic_exponents(u, L))
    # every column is an independent 1-d path
    nr = sample_noise(grid, width, thetas, spec)
    run = exact_quadratic(u, L, T, nr, keep_trajectory=True)
    return np.flatnonzero(event_mask(run.trajectory.x, run.trajectory.v, Cx, Cv))


def estimate_P(Cx: float, Cv: float, u: float, L: float, T: float, trials: int, Ns_fine: int, rng: RngSpec,
               workers: int = 1, batch: int = DEFAULT_BATCH) -> EventEstimate:
    """Monte Carlo estimate of P with a Wilson interval; sup and inf are taken over grid nodes only."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if Ns_fine < MIN_FINE_STEPS:
        logger.warning(f"Ns_fine={Ns_fine} is below {MIN_FINE_STEPS}; sup/inf resolution is coarse")
    if 12 * Cx / Cv > T:
        logger.info(f"12 Cx / Cv = {12 * Cx / Cv:.3g} > T = {T}: no path can satisfy the event")

    widths = [min(batch, trials - start) for start in range(0, trials, batch)]
    found = map_trials(lambda b: _batch_hits(Cx, Cv, u, L, T, Ns_fine, rng.for_trial(b), widths[b]),
                       range(len(widths)), workers)
    hit_paths = tuple((b, int(col)) for b, cols in enumerate(found) for col in cols)
    hits = len(hit_paths)
    ci = wilson_interval(hits, trials)
    logger.info(f"P(Cx={Cx}, Cv={Cv}, u={u}) ~ {hits}/{trials}, 95% CI [{ci[0]:.4g}, {ci[1]:.4g}]")
    return EventEstimate(Cx=Cx, Cv=Cv, u=u, L=L, T=T, trials=trials, hits=hits, ci=ci, hit_paths=hit_paths,
                       Ns_fine=Ns_fine)


def crossing_lower_bound(Cx: float, u: float, L: float, T: float) -> float:
    """P(X_T >= 2Cx, X_{T/2} <= -2Cx), a lower bound on the Cv -> infinity limit of P."""
    half = exact_covariance(u, L, T / 2)
    full = exact_covariance(u, L, T)
    cross = (half @ semigroup(u, L, T / 2).T)[0, 0]  # Cov(X_{T/2}, X_T)
    cov = np.array([[full[0, 0], -cross], [-cross, half[0, 0]]])
    level = -2 * Cx
    return float(stats.multivariate_normal(mean=np.zeros(2), cov=cov).cdf([level, level]))


@dataclass(frozen=True)
class ClowGrid:
    cx: Tuple[float, ...]
    cv: Tuple[float, ...]
    u: Tuple[float, ...]
    u_r: Tuple[float, ...]

    def points(self, ell: float, L: float):
        for Cx, Cv, u, u_r in itertools.product(self.cx, self.cv, self.u, self.u_r):
            if ell < u < u_r <= L:
                yield Cx, Cv, u, u_r


@dataclass(frozen=True)
class ClowResult:
    value: float
    ci: Tuple[float, float]
    argmax: Optional[Dict[str, float]]
    rows: Tuple[Dict[str, float], ...] = field(default_factory=tuple)


def clow_objective(P: float, Cx: float, Cv: float, u: float, u_r: float, ell: float, L: float, T: float) -> float:
    return math.sqrt(P) * Cx ** 2 * min(u - ell, u_r - u) * cbar(Cx, Cv, u_r, L, T)


def clow_search(ell: float, L: float, T: float, grid: ClowGrid, trials: int, Ns_fine: int, rng: RngSpec,
                workers: int = 1) -> ClowResult:
    """Grid search of sqrt(P) Cx^2 min(u - ell, u_R - u) C-bar; the CI follows from P's Wilson interval."""
    cache: Dict[Tuple[float, float, float], EventEstimate] = {}
    rows = []
    best = None
    for Cx, Cv, u, u_r in grid.points(ell, L):
        key = (Cx, Cv, u)
        if key not in cache:
            cache[key] = estimate_P(Cx, Cv, u, L, T, trials, Ns_fine, rng, workers=workers)
        est = cache[key]
        value = clow_objective(est.estimate, Cx, Cv, u, u_r, ell, L, T)
        low = clow_objective(est.ci[0], Cx, Cv, u, u_r, ell, L, T)
        high = clow_objective(est.ci[1], Cx, Cv, u, u_r, ell, L, T)
        row = {"Cx": Cx, "Cv": Cv, "u": u, "u_r": u_r, "P": est.estimate, "P_low": est.ci[0], "P_high": est.ci[1],
               "value": value, "low": low, "high": high}
        rows.append(row)
        if best is None or value > best["value"]:
            best = row
    if not rows:
        raise ValueError("the C_low grid has no point with ell < u < u_R <= L")
    if best["value"] == 0.0:
        logger.warning("Every grid point has a zero P estimate; C_low search is inconclusive")
        return ClowResult(value=0.0, ci=(0.0, max(r["high"] for r in rows)), argmax=None, rows=tuple(rows))
    argmax = {k: best[k] for k in ("Cx", "Cv", "u", "u_r", "P", "P_low", "P_high")}
    logger.info(f"C_low ~ {best['value']:.4e} at {argmax}")
    return ClowResult(value=best["value"], ci=(best["low"], best["high"]), argmax=argmax, rows=tuple(rows))
