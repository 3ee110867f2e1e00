"""Taylor coefficients of the endpoint-singular factor of the general solution.

The factor X(z) = (z - t1)^(-gamma) * (z - t2)^(gamma - 1) carries the
oscillatory square-root singularities at the clamped-arc endpoints. It is
never evaluated pointwise; only its two expansions are used:

    inside the unit circle:   X(z) = sum_{k>=0} alpha_k z^k
    outside the unit circle:  X(z) = sum_{k>=1} beta_k z^(-k)

Both coefficient families come from multiplying two binomial series whose
terms are built by the stable ratio recursion c_k = c_{k-1} * factor_k / k,
so no explicit factorial (which overflows near k = 171) ever appears.

Fractional powers of the unit-modulus endpoints are always computed as
exp(exponent * i * angle) with the angle taken as given, never through a
generic complex power: the choice of 2*pi period is semantically
significant (shifting theta1 by one period multiplies every alpha_k by
-kappa and leaves beta_k unchanged).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import PRINCIPAL, ContinuationParams, ProblemSpec


def continuation_params(kappa: float, branch: str = PRINCIPAL) -> ContinuationParams:
    """Exponent data gamma = 1/2 + i*lambda, lambda = ln(kappa) / (2*pi).

    Requires kappa > 1; kappa = 1 would erase the logarithmic endpoint
    behavior entirely and is rejected.
    """
    if not kappa > 1.0:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    lam = math.log(kappa) / (2.0 * math.pi)
    return ContinuationParams(gamma=complex(0.5, lam), lam=lam, branch=branch)


def falling_products(gamma: complex, k: int) -> tuple[complex, complex]:
    """Products of k descending factors starting at -gamma and at gamma - 1.

    Returns (h_minus, h_plus) where
        h_minus = (-gamma)(-gamma - 1)...(-gamma - k + 1)
        h_plus  = (gamma - 1)(gamma - 2)...(gamma - k)
    computed by multiplying one factor at a time.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    h_minus = complex(1.0)
    h_plus = complex(1.0)
    for j in range(k):
        h_minus *= -gamma - j
        h_plus *= gamma - 1 - j
    return h_minus, h_plus


def unit_power(theta: float, exponent: complex) -> complex:
    """(e^{i*theta})^exponent as exp(exponent * i * theta), branch pinned by theta."""
    return cmath.exp(exponent * 1j * theta)


def _binomial_factors(exponent: complex, phase: complex, n: int) -> np.ndarray:
    """Coefficients c_0..c_n of (1 - phase*z)^exponent via ratio recursion.

    c_l = binom(exponent, l) * (-phase)^l, built incrementally.
    """
    c = np.empty(n + 1, dtype=complex)
    c[0] = 1.0
    for l in range(1, n + 1):
        c[l] = c[l - 1] * ((l - 1 - exponent) / l) * phase
    return c


def alpha_coefficients(
    theta1: float, theta2: float, gamma: complex, up_to: int
) -> np.ndarray:
    """alpha_0..alpha_up_to of the inner expansion, for raw endpoint angles.

    The angles are used exactly as given; callers pick the branch by the
    values they pass.
    """
    if up_to < 0:
        raise ValueError(f"up_to must be >= 0, got {up_to}")
    prefactor = -unit_power(theta1, -gamma) * unit_power(theta2, gamma - 1)
    # (1 - t1^{-1} z)^{-gamma} and (1 - t2^{-1} z)^{gamma-1}
    u = _binomial_factors(-gamma, cmath.exp(-1j * theta1), up_to)
    v = _binomial_factors(gamma - 1, cmath.exp(-1j * theta2), up_to)
    return prefactor * np.convolve(u, v)[: up_to + 1]


def beta_coefficients(
    theta1: float, theta2: float, gamma: complex, up_to: int
) -> np.ndarray:
    """beta_1..beta_up_to of the outer expansion, padded so beta[k] is the
    coefficient of z^(-k) (beta[0] is unused and zero). beta_1 is exactly 1.
    """
    if up_to < 1:
        raise ValueError(f"up_to must be >= 1, got {up_to}")
    # (1 - t1 z^{-1})^{-gamma} and (1 - t2 z^{-1})^{gamma-1}; only integer
    # powers of t1, t2 appear, so beta is branch independent.
    p = _binomial_factors(-gamma, cmath.exp(1j * theta1), up_to - 1)
    q = _binomial_factors(gamma - 1, cmath.exp(1j * theta2), up_to - 1)
    beta = np.zeros(up_to + 1, dtype=complex)
    beta[1:] = np.convolve(p, q)[:up_to]
    return beta


@dataclass(frozen=True)
class TaylorCoefficients:
    """Expansion coefficients of X(z) up to order 2N.

    ``alpha[k]`` is the coefficient of z^k (0 <= k <= 2N); ``beta[k]`` the
    coefficient of z^(-k) (1 <= k <= 2N, entry 0 is padding).
    """

    alpha: np.ndarray
    beta: np.ndarray
    N: int


def taylor_coefficients(
    spec: ProblemSpec, params: ContinuationParams, N: int
) -> TaylorCoefficients:
    """Both coefficient families to order 2N for the given problem."""
    shift = params.angle_shift
    a1, a2 = spec.theta1 + shift, spec.theta2 + shift
    alpha = alpha_coefficients(a1, a2, params.gamma, 2 * N)
    beta = beta_coefficients(a1, a2, params.gamma, 2 * N)
    if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
        raise ArithmeticError("non-finite expansion coefficients")
    return TaylorCoefficients(alpha=alpha, beta=beta, N=N)
