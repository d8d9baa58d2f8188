import logging
from typing import List, Optional, Sequence

import numpy as np

from langevin.noise import NoiseRealization, GridError, step_node, midpoint_time, weighted_integrals
from langevin.potentials import Potential
from .semigroup import semigroup_entries, JORDAN_TOLERANCE
from .state import PhaseState, SolverRun, Query, _Recorder

logger = logging.getLogger(__name__)

EXACT = "exact"
EM = "em"
RMM = "rmm"
SOLVERS = (EXACT, EM, RMM)


def quadratic_exponents(u, L: float) -> List[float]:
    """The exponents lambda_-, lambda_+ the exact solver needs for every curvature in u."""
    out = []
    for value in np.unique(np.atleast_1d(np.asarray(u, dtype=float))):
        root = np.sqrt(1.0 - value / L)
        out.extend([1.0 - root, 1.0 + root])
    return out


def exact_quadratic(u, L: float, T: float, nr: NoiseRealization, keep_trajectory: bool = False) -> SolverRun:
    """Pathwise exact solution for U(x) = sum_i u_i x_i^2 / 2 on every subinterval of the realization's grid.

    u may be a scalar or one curvature per dimension.
    """
    d = nr.d
    curv = np.broadcast_to(np.asarray(u, dtype=float), (d,)).copy()
    if np.any(curv <= 0) or np.any(curv > L):
        raise ValueError(f"curvatures must lie in (0, L], got {curv}")
    if np.any(1.0 - curv / L < JORDAN_TOLERANCE):
        raise ValueError("exact solver needs u < L; the u = L case has non-exponential noise weights")
    stop = nr.grid.index(T)

    root = np.sqrt(1.0 - curv / L)
    lam_minus, lam_plus = 1.0 - root, 1.0 + root
    dims = np.arange(d)
    idx_minus = np.array([nr.exponents.index(t) for t in lam_minus])
    idx_plus = np.array([nr.exponents.index(t) for t in lam_plus])
    j_minus = nr.increments[:stop, idx_minus, dims]
    j_plus = nr.increments[:stop, idx_plus, dims]
    scale = 1.0 / np.sqrt(L - curv)
    noise_x = (j_minus - j_plus) * scale
    noise_v = (lam_plus * j_plus - lam_minus * j_minus) * scale

    widths = nr.grid.widths()[:stop]
    m00, m01, m10, m11 = semigroup_entries(curv[None, :], L, widths[:, None])

    state = PhaseState.at_rest(np.zeros(d))
    x, v = state.x, state.v
    recorder = _Recorder(keep_trajectory)
    recorder.add(0.0, x, v)
    points = nr.grid.points
    for i in range(stop):
        x, v = m00[i] * x + m01[i] * v + noise_x[i], m10[i] * x + m11[i] * v + noise_v[i]
        recorder.add(float(points[i + 1]), x, v)
    return SolverRun(solver=EXACT, final=PhaseState(x, v), Ns=stop, trajectory=recorder.build())


def em_integrate(p: Potential, Ns: int, T: float, nr: NoiseRealization, keep_trajectory: bool = False) -> SolverRun:
    """Exponential Euler-Maruyama: the gradient is frozen at the left node of each step."""
    if Ns < 1:
        raise ValueError(f"Ns must be >= 1, got {Ns}")
    if p.d != nr.d:
        raise ValueError(f"potential dimension {p.d} does not match noise dimension {nr.d}")
    L = p.L
    h = T / Ns
    sqrt_L = np.sqrt(L)
    decay = np.exp(-2 * h)
    half_gain = -np.expm1(-2 * h) / 2    # int_0^h exp(2(s-h)) ds
    drift_x = (h - half_gain) / (2 * L)  # int_0^h (1 - exp(2(s-h))) ds / (2L)
    drift_v = half_gain / L

    state = PhaseState.at_rest(p.minimizer)
    x, v = state.x, state.v
    trace: List[Query] = []
    recorder = _Recorder(keep_trajectory)
    recorder.add(0.0, x, v)
    for k in range(Ns):
        s0, s1 = step_node(k, Ns, T), step_node(k + 1, Ns, T)
        j0, j2 = weighted_integrals(nr, s0, s1, (0.0, 2.0), s1)
        g = p.grad(x)
        trace.append((x.copy(), s0))
        x, v = (x + half_gain * v + (j0 - j2) / sqrt_L - drift_x * g,
                decay * v + 2 * j2 / sqrt_L - drift_v * g)
        recorder.add(s1, x, v)
    return SolverRun(solver=EM, final=PhaseState(x, v), Ns=Ns, query_trace=trace, trajectory=recorder.build())


def rmm_integrate(p: Potential, Ns: int, T: float, nr: NoiseRealization, eta: Sequence[float],
                  keep_trajectory: bool = False) -> SolverRun:
    """Randomized midpoint method: two gradient queries per step, the second at a uniform random time."""
    eta = np.asarray(eta, dtype=float)
    if Ns < 1:
        raise ValueError(f"Ns must be >= 1, got {Ns}")
    if eta.shape != (Ns,):
        raise ValueError(f"expected {Ns} midpoint fractions, got shape {eta.shape}")
    if p.d != nr.d:
        raise ValueError(f"potential dimension {p.d} does not match noise dimension {nr.d}")
    L = p.L
    h = T / Ns
    sqrt_L = np.sqrt(L)
    decay = np.exp(-2 * h)
    half_gain = -np.expm1(-2 * h) / 2

    state = PhaseState.at_rest(p.minimizer)
    x, v = state.x, state.v
    trace: List[Query] = []
    recorder = _Recorder(keep_trajectory)
    recorder.add(0.0, x, v)
    for k in range(Ns):
        s0, s1 = step_node(k, Ns, T), step_node(k + 1, Ns, T)
        tm = midpoint_time(k, eta[k], Ns, T)
        if not nr.grid.contains(tm):
            raise GridError(f"midpoint {tm!r} of step {k} is not on the noise grid")
        reach = eta[k] * h
        mid_gain = -np.expm1(-2 * reach) / 2

        # predictor over [s_k, s_k + eta h]
        m0, m2 = weighted_integrals(nr, s0, tm, (0.0, 2.0), tm)
        g = p.grad(x)
        trace.append((x.copy(), tm))
        x_mid = x + mid_gain * v + (m0 - m2) / sqrt_L - (reach - mid_gain) / (2 * L) * g

        j0, j2 = weighted_integrals(nr, s0, s1, (0.0, 2.0), s1)
        g_mid = p.grad(x_mid)
        trace.append((x_mid.copy(), s1))
        weight = np.exp(2 * (reach - h))
        x, v = (x + half_gain * v + (j0 - j2) / sqrt_L + h * np.expm1(2 * (reach - h)) / (2 * L) * g_mid,
                decay * v + 2 * j2 / sqrt_L - h * weight / L * g_mid)
        recorder.add(s1, x, v)
    return SolverRun(solver=RMM, final=PhaseState(x, v), Ns=Ns, query_trace=trace,
                     trajectory=recorder.build(), eta=eta.copy())


def run_solver(solver: str, p: Potential, Ns: int, T: float, nr: NoiseRealization,
               eta: Optional[Sequence[float]] = None, keep_trajectory: bool = False) -> SolverRun:
    if solver == EM:
        return em_integrate(p, Ns, T, nr, keep_trajectory=keep_trajectory)
    if solver == RMM:
        if eta is None:
            raise ValueError("the randomized midpoint solver needs eta")
        return rmm_integrate(p, Ns, T, nr, eta, keep_trajectory=keep_trajectory)
    if solver == EXACT:
        if not p.is_quadratic:
            raise ValueError(f"the exact solver only handles quadratic potentials, got {p.kind}")
        return exact_quadratic(p.curvatures, p.L, T, nr, keep_trajectory=keep_trajectory)
    raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")


def reference_solution(p: Potential, nr: NoiseRealization, Ns_ref: int, T: float,
                       eta: Optional[Sequence[float]] = None) -> PhaseState:
    """Coupled reference X_T: exact for quadratic targets, fine RMM on its own eta stream otherwise."""
    if p.is_quadratic:
        return exact_quadratic(p.curvatures, p.L, T, nr).final
    if eta is None:
        raise ValueError("a non-quadratic reference needs its own eta draws")
    return rmm_integrate(p, Ns_ref, T, nr, eta).final


def replay_gradients(trace: Sequence[Query], p: Potential) -> np.ndarray:
    """Re-evaluate the gradient of p at every recorded query point."""
    if not trace:
        return np.zeros((0, p.d))
    return np.asarray([p.grad(np.asarray(y, dtype=float)) for y, _ in trace])
