import logging

import numpy as np
from scipy.special import roots_legendre

from langevin.noise import ito_inner
from .state import MomentState

logger = logging.getLogger(__name__)

MIN_QUADRATURE = 16


def _step_maps(u: float, L: float, h: float, eta: float):
    """Affine form (A, B, Q) of one midpoint step for a 1-d quadratic given eta.

    (X', V') = A (X, V) + B I with I = (I1, I2, I3) Gaussian of covariance Q:
    I1 = int_0^{eta h} (1 - exp(2(s - eta h))) dW, I2 = int_0^h (1 - exp(2(s - h))) dW,
    I3 = int_0^h exp(2(s - h)) dW.
    """
    ratio = u / L
    reach = eta * h
    half_gain = -np.expm1(-2 * h) / 2
    mid_gain = -np.expm1(-2 * reach) / 2
    keep_x = 1.0 - ratio * (reach - mid_gain) / 2
    pull_x = -ratio * h * np.expm1(2 * (reach - h)) / 2
    pull_v = ratio * h * np.exp(2 * (reach - h))

    A = np.array([[1.0 - pull_x * keep_x, half_gain - pull_x * mid_gain],
                  [-pull_v * keep_x, np.exp(-2 * h) - pull_v * mid_gain]])
    root = 1.0 / np.sqrt(L)
    B = np.array([[-pull_x * root, root, 0.0],
                  [-pull_v * root, 0.0, 2 * root]])

    integrands = [
        ([(1.0, 0.0, 0.0), (-1.0, 2.0, reach)], reach),
        ([(1.0, 0.0, 0.0), (-1.0, 2.0, h)], h),
        ([(1.0, 2.0, h)], h),
    ]
    Q = np.empty((3, 3))
    for i, (terms_i, end_i) in enumerate(integrands):
        for j, (terms_j, end_j) in enumerate(integrands):
            Q[i, j] = ito_inner(terms_i, terms_j, 0.0, min(end_i, end_j))
    return A, B, Q


def moment_propagate_rmm_quadratic(u: float, L: float, h: float, Ns: int, quadrature: int = MIN_QUADRATURE) -> MomentState:
    """Exact first and second moments of Ns midpoint steps from rest, averaged over eta by Gauss-Legendre."""
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    if quadrature < MIN_QUADRATURE:
        raise ValueError(f"need at least {MIN_QUADRATURE} quadrature nodes, got {quadrature}")
    if Ns < 0:
        raise ValueError(f"Ns must be non-negative, got {Ns}")
    if Ns == 0:
        return MomentState.origin()

    nodes, weights = roots_legendre(quadrature)
    etas = (nodes + 1.0) / 2
    weights = weights / 2
    maps = [_step_maps(u, L, h, eta) for eta in etas]
    mean_map = sum(w * A for w, (A, _, _) in zip(weights, maps))
    noise_part = sum(w * B @ Q @ B.T for w, (_, B, Q) in zip(weights, maps))

    mean = np.zeros(2)
    second = np.zeros((2, 2))
    for _ in range(Ns):
        second = sum(w * A @ second @ A.T for w, (A, _, _) in zip(weights, maps)) + noise_part
        mean = mean_map @ mean
    cov = second - np.outer(mean, mean)
    return MomentState(mean=mean, cov=0.5 * (cov + cov.T))
