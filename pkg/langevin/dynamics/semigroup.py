"""Closed-form Ornstein-Uhlenbeck propagator for quadratic potentials.

For U(x) = u x^2 / 2 the drift is linear, d(X, V) = H (X, V) dt + b dW with
H = [[0, 1], [-u/L, -2]] and b = (0, 2/sqrt(L)). The eigenvalues of H are
-lambda_-, -lambda_+ with lambda_pm = 1 +- sqrt(1 - u/L).
"""
import logging
from typing import Tuple

import numpy as np
from scipy import integrate

logger = logging.getLogger(__name__)

JORDAN_TOLERANCE = 1e-9


def _check(u, L):
    if np.any(np.asarray(u) <= 0) or np.any(np.asarray(u) > L):
        raise ValueError(f"need 0 < u <= L, got u={u}, L={L}")


def decay_rates(u: float, L: float) -> Tuple[float, float]:
    """(lambda_-, lambda_+) for a curvature strictly below L."""
    _check(u, L)
    root = np.sqrt(1.0 - u / L)
    return float(1.0 - root), float(1.0 + root)


def semigroup_entries(u, L: float, t):
    """Entries (m00, m01, m10, m11) of exp(H t), broadcast over arrays of u and t.

    Written with cosh/sinh of t*sqrt(1-u/L); this equals the lambda_pm form and
    tends to the Jordan form exp(-t) [[1+t, t], [-t, 1-t]] as u -> L.
    """
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    gap = 1.0 - u / L
    jordan = np.abs(gap) < JORDAN_TOLERANCE
    root = np.sqrt(np.where(jordan, 1.0, gap))
    damp = np.exp(-t)
    cosh = np.cosh(t * root)
    sinc = np.where(jordan, t, np.sinh(t * root) / root)  # sinh(t root) / root
    ratio = np.where(jordan, 1.0, u / L)
    m00 = damp * (cosh + sinc)
    m01 = damp * sinc
    m10 = -ratio * damp * sinc
    m11 = damp * (cosh - sinc)
    m00 = np.where(jordan, damp * (1 + t), m00)
    m11 = np.where(jordan, damp * (1 - t), m11)
    return m00, m01, m10, m11


def semigroup(u: float, L: float, t: float) -> np.ndarray:
    """exp(H t) as a 2x2 matrix."""
    _check(u, L)
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    m00, m01, m10, m11 = semigroup_entries(u, L, t)
    return np.array([[m00, m01], [m10, m11]], dtype=float)


def exact_covariance(u: float, L: float, t: float) -> np.ndarray:
    """Cov(X_t, V_t) from rest: int_0^t exp(Hs) b b^T exp(H^T s) ds by adaptive quadrature."""
    _check(u, L)
    if t == 0:
        return np.zeros((2, 2))

    def integrand(s):
        _, m01, _, m11 = semigroup_entries(u, L, s)
        col = np.array([m01, m11]) * (2.0 / np.sqrt(L))
        return np.outer(col, col)

    value, _ = integrate.quad_vec(integrand, 0.0, t, epsabs=1e-14, epsrel=1e-12)
    return 0.5 * (value + value.T)


def x_variance_oracle(u: float, L: float, T: float) -> float:
    """Var(X_T) = int_0^T (exp(-s lambda_-) - exp(-s lambda_+))^2 / (L - u) ds."""
    lam_minus, lam_plus = decay_rates(u, L)
    if u >= L:
        raise ValueError("the variance oracle needs u < L")

    def integrand(s):
        return (np.exp(-s * lam_minus) - np.exp(-s * lam_plus)) ** 2 / (L - u)

    value, _ = integrate.quad(integrand, 0.0, T, epsabs=1e-14, epsrel=1e-12, limit=200)
    return float(value)


def stationary_covariance(u: float, L: float) -> np.ndarray:
    """Covariance of the invariant law exp(-U(x) - L |v|^2 / 2) for U = u x^2 / 2."""
    _check(u, L)
    return np.diag([1.0 / u, 1.0 / L])
