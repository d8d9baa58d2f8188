"""Pathwise checks of the perturbation, trapping and separation properties on coupled fine-grid runs."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from langevin.dynamics import exact_quadratic, quadratic_exponents, rmm_integrate
from langevin.noise import ExponentSet, plan_grid, sample_noise
from langevin.potentials import BetaIndex, Potential, adversarial, beta_ge, bump_g, quadratic
from utils.parallel import map_trials
from utils.rng import RngSpec, draw_midpoints
from .bounds import bump_measure, cbar, epsilon_bar, perturbation_bounds
from .curves import OrderFit, fit_loglog
from .probability import event_mask

logger = logging.getLogger(__name__)

GAP_GRID = np.linspace(-8.0, 8.0, 40001)


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    violations: int
    trials: int
    detail: Dict[str, float] = field(default_factory=dict)
    inconclusive: bool = False

    def as_check(self) -> Dict:
        detail = dict(self.detail, violations=self.violations, trials=self.trials)
        if self.inconclusive:
            detail["inconclusive"] = True
        return {"name": self.name, "pass": self.passed, "detail": detail}


def _coupled_runs(potentials: Sequence[Potential], T: float, Ns_fine: int, spec: RngSpec,
                  keep_trajectory: bool, extra_thetas=()):
    """Fine midpoint runs of several potentials on one path realization and one eta draw."""
    eta = draw_midpoints(spec, Ns_fine, substream=Ns_fine)
    grid = plan_grid(Ns_fine, T, eta)
    nr = sample_noise(grid, 1, ExponentSet.of(*extra_thetas), spec)
    runs = [rmm_integrate(p, Ns_fine, T, nr, eta, keep_trajectory=keep_trajectory) for p in potentials]
    return nr, runs


def _family(u, Cx, N, xi, betas, ell, L):
    ell = u - xi if ell is None else ell
    return ell, [adversarial(u, Cx, N, xi, beta, ell=ell, L=L) for beta in betas]


def check_perturbation(u: float, L: float, T: float, Cx: float, N: int, xi: float, betas: Sequence[BetaIndex],
                       trials: int, Ns_fine: int, rng: RngSpec, slack: float = 0.05, workers: int = 1,
                       ell: Optional[float] = None) -> CheckReport:
    """max_t |X_t(U_beta) - X_t(U_u)| and the velocity gap stay within the perturbation bounds."""
    eps = bump_g(Cx, N, xi).eps
    bound_x, bound_v = perturbation_bounds(eps, u, L)
    ell, family = _family(u, Cx, N, xi, betas, ell, L)
    base = quadratic(u, 1, ell=ell, L=L)

    def one_trial(t):
        _, runs = _coupled_runs([base] + family, T, Ns_fine, rng.for_trial(t), keep_trajectory=True)
        ref = runs[0].trajectory
        gaps = np.empty((len(family), 2))
        for i, run in enumerate(runs[1:]):
            gaps[i, 0] = np.abs(run.trajectory.x - ref.x).max()
            gaps[i, 1] = np.abs(run.trajectory.v - ref.v).max()
        return gaps

    gaps = np.stack(map_trials(one_trial, range(trials), workers))
    over = (gaps[..., 0] > (1 + slack) * bound_x) | (gaps[..., 1] > (1 + slack) * bound_v)
    violations = int(over.sum())
    detail = {"eps": eps, "bound_x": bound_x, "bound_v": bound_v, "slack": slack,
              "max_dx": float(gaps[..., 0].max()), "max_dv": float(gaps[..., 1].max()),
              "max_ratio_x": float(gaps[..., 0].max() / bound_x), "max_ratio_v": float(gaps[..., 1].max() / bound_v)}
    if violations:
        logger.warning(f"Perturbation bound violated on {violations} (trial, beta) pairs")
    return CheckReport("perturbation", violations == 0, violations, trials, detail)


def perturbation_scaling(u: float, L: float, T: float, Cx: float, xi: float, N_list: Sequence[int], trials: int,
                         Ns_fine: int, rng: RngSpec, workers: int = 1) -> Tuple[OrderFit, List[Dict[str, float]]]:
    """Mean over paths of max |Delta X| for the all-ones index against eps; slope near 1."""
    rows = []
    for N in N_list:
        eps = bump_g(Cx, N, xi).eps
        _, family = _family(u, Cx, N, xi, [BetaIndex.ones(N)], None, L)
        base = quadratic(u, 1, ell=u - xi, L=L)

        def one_trial(t):
            _, runs = _coupled_runs([base, family[0]], T, Ns_fine, rng.for_trial(t), keep_trajectory=True)
            return float(np.abs(runs[1].trajectory.x - runs[0].trajectory.x).max())

        observed = float(np.mean(map_trials(one_trial, range(trials), workers)))
        rows.append({"N": N, "eps": eps, "max_dx": observed})
    fit = fit_loglog([r["eps"] for r in rows], [r["max_dx"] for r in rows], label="perturbation_vs_eps")
    return fit, rows


def check_trapping(upper: Potential, lower: Potential, T: float, trials: int, Ns_fine: int, rng: RngSpec,
                   tol: float = 1e-9, slack_scale: float = 1.0, workers: int = 1,
                   points: Optional[np.ndarray] = None) -> CheckReport:
    """With grad upper - grad lower >= 0, the coupled gaps keep Delta_X <= 0 and Delta_V <= -Delta_X."""
    if upper.d != 1 or lower.d != 1:
        raise ValueError("the trapping check works on 1-d potentials")
    if upper.L != lower.L:
        raise ValueError("both potentials must share L")
    points = GAP_GRID if points is None else np.asarray(points, dtype=float)
    gap = upper.grad(points) - lower.grad(points)
    if gap.min() < -1e-12:
        raise ValueError(f"gradient gap is negative ({gap.min():.3e}) at x={points[gap.argmin()]:.6g}")
    h = T / Ns_fine
    allowance = tol + slack_scale * float(gap.max()) * h * h / upper.L

    def one_trial(t):
        _, runs = _coupled_runs([upper, lower], T, Ns_fine, rng.for_trial(t), keep_trajectory=True)
        dx = runs[0].trajectory.x - runs[1].trajectory.x
        dv = runs[0].trajectory.v - runs[1].trajectory.v
        return float(dx.max()), float((dv + dx).max()), float(dx.min())

    worst = np.asarray(map_trials(one_trial, range(trials), workers))
    bad = (worst[:, 0] > allowance) | (worst[:, 1] > allowance)
    violations = int(bad.sum())
    detail = {"allowance": allowance, "max_dx": float(worst[:, 0].max()), "max_dv_plus_dx": float(worst[:, 1].max()),
              "min_dx": float(worst[:, 2].min())}
    if violations:
        logger.warning(f"Trapping region left on {violations} of {trials} paths")
    return CheckReport("trapping", violations == 0, violations, trials, detail)


def _separation_inputs(u, u_r, L, Cx, Cv, xi, N):
    if xi > u_r - u:
        raise ValueError(f"xi={xi} exceeds u_R - u = {u_r - u}")
    eps = bump_g(Cx, N, xi).eps
    limit = epsilon_bar(Cx, Cv, u, L)
    if not eps < limit:
        raise ValueError(f"eps={eps:.4g} must be below eps-bar={limit:.4g}; increase N")
    return eps


def check_separation(u: float, u_r: float, L: float, Cx: float, Cv: float, xi: float, N: int,
                     beta_low: BetaIndex, beta_high: BetaIndex, T: float, trials: int, Ns_fine: int, rng: RngSpec,
                     slack: float = 0.1, workers: int = 1, ell: Optional[float] = None) -> CheckReport:
    """On event paths, |X_T(U_high) - X_T(U_low)| >= (1 - slack) C-bar eps mu.

    A trial is on the event when the crossing event holds for the quadratic path and for both
    endpoint trajectories, all read at the fine step nodes.
    """
    if not beta_ge(beta_high, beta_low):
        raise ValueError("beta_high must dominate beta_low componentwise")
    eps = _separation_inputs(u, u_r, L, Cx, Cv, xi, N)
    extra = sum(h > l for h, l in zip(beta_high.bits, beta_low.bits))
    bound = cbar(Cx, Cv, u_r, L, T) * eps * bump_measure(extra, Cx, N)
    _, (high, low) = _family(u, Cx, N, xi, [beta_high, beta_low], ell, L)

    def one_trial(t):
        nr, runs = _coupled_runs([high, low], T, Ns_fine, rng.for_trial(t), keep_trajectory=True,
                                 extra_thetas=quadratic_exponents(u, L))
        path = exact_quadratic(u, L, T, nr, keep_trajectory=True).trajectory
        proxy = bool(event_mask(path.x, path.v, Cx, Cv)[0])
        # the event must hold for both endpoint potentials as well as the quadratic
        inside = proxy and all(bool(event_mask(r.trajectory.x, r.trajectory.v, Cx, Cv)[0]) for r in runs)
        return proxy, inside, float(abs(runs[0].final.x[0] - runs[1].final.x[0]))

    results = map_trials(one_trial, range(trials), workers)
    on_event = [gap for _, inside, gap in results if inside]
    violations = sum(gap < (1 - slack) * bound for gap in on_event)
    detail = {"eps": eps, "bound": bound, "extra_bumps": extra, "hits": len(on_event),
              "hit_rate": len(on_event) / trials, "quadratic_hits": sum(r[0] for r in results), "slack": slack}
    if on_event and bound > 0:
        margins = np.asarray(on_event) / bound
        detail.update(min_margin=float(margins.min()), median_margin=float(np.median(margins)))
    if not on_event:
        logger.warning("No path fell in the crossing event; separation check is inconclusive")
    return CheckReport("separation", violations == 0, int(violations), trials, detail, inconclusive=not on_event)


def bumps_near_origin(N: int, count: int) -> BetaIndex:
    """Index activating the count cells closest to the origin, alternating sides."""
    order = sorted(range(-N, N), key=lambda j: (abs(j + 0.5), j))
    active = set(order[:count])
    return BetaIndex(tuple(1 if j in active else 0 for j in range(-N, N)))


def separation_scaling(u: float, u_r: float, L: float, Cx: float, Cv: float, xi: float, N: int, k_list: Sequence[int],
                       T: float, trials: int, Ns_fine: int, rng: RngSpec,
                       workers: int = 1) -> Tuple[OrderFit, List[Dict[str, float]]]:
    """Mean |Delta X_T| against the number k of extra bumps on shared paths; grows with k, at most about linearly."""
    _separation_inputs(u, u_r, L, Cx, Cv, xi, N)
    k_list = [int(k) for k in k_list if k > 0]
    if len(k_list) < 2:
        raise ValueError("need at least two positive bump counts")
    _, family = _family(u, Cx, N, xi, [BetaIndex.zeros(N)] + [bumps_near_origin(N, k) for k in k_list], None, L)

    def one_trial(t):
        _, runs = _coupled_runs(family, T, Ns_fine, rng.for_trial(t), keep_trajectory=False)
        return [abs(run.final.x[0] - runs[0].final.x[0]) for run in runs[1:]]

    gaps = np.asarray(map_trials(one_trial, range(trials), workers))
    means = gaps.mean(axis=0)
    rows = [{"k": k, "mean_gap": float(m), "mu": bump_measure(k, Cx, N)} for k, m in zip(k_list, means)]
    fit = fit_loglog(k_list, means, label="separation_vs_bumps")
    return fit, rows
