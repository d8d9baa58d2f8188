"""Equivalence classes of adversarial indices seen through a solver's queries."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from langevin.analysis import CheckReport, bump_measure, cbar, epsilon_bar, event_mask
from langevin.dynamics import EM, RMM, exact_quadratic, quadratic_exponents, replay_gradients, rmm_integrate, run_solver
from langevin.noise import ExponentSet, merge_grids, plan_grid, sample_noise
from langevin.potentials import BetaIndex, adversarial, random_beta
from utils.parallel import map_trials
from utils.rng import RngSpec, draw_midpoints
from .chains import chain_partner
from .intervals import ReducedIndex, complete_intervals, expand_reduced, reduce_index, restrict

logger = logging.getLogger(__name__)

REFERENCE_SUBSTREAM = 0


def steps_for_budget(solver: str, N: int) -> int:
    """Step count spending exactly N gradient queries."""
    if solver == EM:
        return N
    if solver == RMM:
        if N % 2:
            raise ValueError(f"the midpoint solver spends 2 queries per step; N={N} is odd")
        return N // 2
    raise ValueError(f"class experiments need a query-tracing solver (em or rmm), got {solver!r}")


def _same_run(a, b) -> bool:
    if not (np.array_equal(a.final.x, b.final.x) and np.array_equal(a.final.v, b.final.v)):
        return False
    if len(a.query_trace) != len(b.query_trace):
        return False
    return all(np.array_equal(ya, yb) and ta == tb for (ya, ta), (yb, tb) in zip(a.query_trace, b.query_trace))


@dataclass(frozen=True)
class ClassReport:
    equivalence: CheckReport
    separation: CheckReport
    spread_mean: float
    spread_floor: float

    @property
    def empirical_constant(self) -> float:
        return self.spread_mean / self.spread_floor if self.spread_floor > 0 else 0.0

    def checks(self):
        return [self.equivalence.as_check(), self.separation.as_check()]


def class_experiment(solver: str, u: float, Cx: float, Cv: float, xi: float, N: int, T: float, trials: int,
                     rng: RngSpec, L: float, Ns_fine: int = 1024, u_r: Optional[float] = None,
                     slack: float = 0.1, workers: int = 1) -> ClassReport:
    """Indistinguishability, separation and spread over one equivalence class per trial.

    Per trial the path and the solver's eta are fixed. The solver runs on a random
    U_beta, its queries fix the completed cell set J, and a class mate that differs
    only off J must reproduce the run bit for bit. The reduced index and its chain
    partner then give two class members whose fine-grid solutions must separate.
    """
    Ns = steps_for_budget(solver, N)
    u_r = u + xi if u_r is None else u_r
    ell = u - xi
    eps = Cx * xi / (8 * N)
    limit = epsilon_bar(Cx, Cv, u, L)
    separable_regime = eps < limit
    if not separable_regime:
        logger.warning(f"eps={eps:.3g} >= eps-bar={limit:.3g}; separation is reported but not asserted")
    c_bar = cbar(Cx, Cv, u_r, L, T)

    def family(beta: BetaIndex):
        return adversarial(u, Cx, N, xi, beta, ell=ell, L=L)

    def one_trial(t):
        spec = rng.for_trial(t)
        eta = draw_midpoints(spec, Ns, substream=Ns) if solver == RMM else None
        eta_ref = draw_midpoints(spec, Ns_fine, substream=REFERENCE_SUBSTREAM)
        grid = merge_grids(plan_grid(Ns, T, eta), plan_grid(Ns_fine, T, eta_ref))
        nr = sample_noise(grid, 1, ExponentSet.of(*quadratic_exponents(u, L)), spec)

        beta = random_beta(N, spec)
        first = run_solver(solver, family(beta), Ns, T, nr, eta=eta)
        J = complete_intervals(first.query_points().ravel(), Cx, N)

        # a class mate: same bits on J, fresh bits elsewhere
        fresh = reduce_index(random_beta(N, spec, substream=1), J)
        mate = expand_reduced(fresh, restrict(beta, J), J)
        second = run_solver(solver, family(mate), Ns, T, nr, eta=eta)
        identical = _same_run(first, second) and np.array_equal(
            replay_gradients(first.query_trace, family(beta)), replay_gradients(first.query_trace, family(mate)))

        reduced = reduce_index(beta, J)
        partner = chain_partner(reduced.bits)
        low_bits, high_bits = sorted((reduced.bits, partner), key=sum)
        on_J = restrict(beta, J)
        low = expand_reduced(ReducedIndex(low_bits), on_J, J)
        high = expand_reduced(ReducedIndex(high_bits), on_J, J)
        x_low = rmm_integrate(family(low), Ns_fine, T, nr, eta_ref).final.x[0]
        x_high = rmm_integrate(family(high), Ns_fine, T, nr, eta_ref).final.x[0]
        output = first.final.x[0]
        spread = (x_low - output) ** 2 + (x_high - output) ** 2

        path = exact_quadratic(u, L, T, nr, keep_trajectory=True).trajectory
        inside = bool(event_mask(path.x, path.v, Cx, Cv)[0])
        extra = sum(h > l for h, l in zip(high_bits, low_bits))
        return identical, inside, abs(x_high - x_low), extra, spread

    results = map_trials(one_trial, range(trials), workers)

    mismatches = sum(not r[0] for r in results)
    equivalence = CheckReport("class_equivalence", mismatches == 0, mismatches, trials, {"N": N, "Ns": Ns})
    if mismatches:
        logger.warning(f"{mismatches} class mates were distinguishable by {solver}")

    hits = [(gap, extra) for _, inside, gap, extra, _ in results if inside]
    violations = 0
    if separable_regime:
        violations = sum(gap < (1 - slack) * c_bar * eps * bump_measure(extra, Cx, N) for gap, extra in hits)
    separation = CheckReport("class_separation", violations == 0, violations, trials,
                             {"hits": len(hits), "eps": eps, "eps_bar": limit, "cbar": c_bar,
                              "asserted": separable_regime},
                             inconclusive=not hits)

    spreads = np.array([r[4] for r in results])
    floor = Cx ** 4 * c_bar ** 2 * xi ** 2 / N ** 3
    logger.info(f"Class spread: mean {spreads.mean():.3e}, floor {floor:.3e}")
    return ClassReport(equivalence=equivalence, separation=separation, spread_mean=float(spreads.mean()),
                       spread_floor=floor)
