"""Arc integrals of the singular factor over the clamped and free arcs.

The solver needs the moments

    c_arc(k) = i * integral over the arc of X(t) * e^{i(k+1)theta} dtheta

for the clamped arc (theta1 -> theta2, traversed so the outer region stays
left) and the free arc (theta2 -> theta1 + 2*pi). On the unit circle the
integrand reduces to a real-domain form: an inverse-square-root weight in
the distance to each endpoint times a phase whose angle contains a
logarithmic term. Each integral is evaluated with the equal-spaced open
sum over m = 1..M interior nodes (endpoints excluded), which converges
like sqrt of the step for this endpoint singularity. A Gauss-Jacobi rule
would converge much faster but the plain open sum is kept deliberately:
point counts M1, M2 are part of each benchmark case's definition and the
slow-oscillation behavior of the identity checks depends on it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import ContinuationParams, ProblemSpec


def k0_formula(theta1: float, theta2: float, lam: float) -> complex:
    """Prefactor -(i/2) * exp(lam/2*(theta1-theta2) - i/4*(theta1+theta2))."""
    return -0.5j * cmath.exp(
        0.5 * lam * (theta1 - theta2) - 0.25j * (theta1 + theta2)
    )


def k0_constant(spec: ProblemSpec, params: ContinuationParams) -> complex:
    return k0_formula(spec.theta1, spec.theta2, params.lam)


def _phase_sums(
    thetas: np.ndarray,
    weights: np.ndarray,
    log_ratio: np.ndarray,
    lam: float,
    k_min: int,
    k_max: int,
) -> np.ndarray:
    """sum_m w_m * exp(i*eta(k, theta_m)) for k = k_min..k_max.

    eta(k, theta) = (k + 1/2)*theta + lam*log_ratio(theta). The k-independent
    part is folded into one complex weight; successive k values then differ
    by a multiplication with e^{i*theta}, which keeps memory flat for large M.
    """
    g = weights * np.exp(1j * (0.5 * thetas + lam * log_ratio))
    z = np.exp(1j * thetas)
    current = g * z**k_min
    out = np.empty(k_max - k_min + 1, dtype=complex)
    for i in range(out.shape[0]):
        out[i] = current.sum()
        if i + 1 < out.shape[0]:
            current *= z
    return out


def c12_table(
    spec: ProblemSpec,
    params: ContinuationParams,
    N: int,
    M2: int,
    k_min: int | None = None,
    k_max: int | None = None,
) -> np.ndarray:
    """Clamped-arc moments c12_k for k = k_min..k_max (default -N-1..N)."""
    if k_min is None:
        k_min = -N - 1
    if k_max is None:
        k_max = N
    t1, t2, lam = spec.theta1, spec.theta2, params.lam
    dtheta = (t2 - t1) / (M2 + 1)
    thetas = t1 + dtheta * np.arange(1, M2 + 1)
    s_left = np.sin(0.5 * (thetas - t1))
    s_right = np.sin(0.5 * (t2 - thetas))
    weights = dtheta / np.sqrt(s_left * s_right)
    log_ratio = np.log(s_right) - np.log(s_left)
    sums = _phase_sums(thetas, weights, log_ratio, lam, k_min, k_max)
    k0 = k0_formula(t1, t2, lam)
    return -math.exp(math.pi * lam) * k0 * sums


def c11_table(
    spec: ProblemSpec,
    params: ContinuationParams,
    N: int,
    M1: int,
    k_min: int | None = None,
    k_max: int | None = None,
) -> np.ndarray:
    """Free-arc moments c11_k for k = k_min..k_max (default -N-1..N)."""
    if k_min is None:
        k_min = -N - 1
    if k_max is None:
        k_max = N
    t1, t2, lam = spec.theta1, spec.theta2, params.lam
    dtheta = (t1 - t2 + 2.0 * math.pi) / (M1 + 1)
    thetas = t2 + dtheta * np.arange(1, M1 + 1)
    s_left = np.sin(0.5 * (thetas - t1))
    s_right = np.sin(0.5 * (thetas - t2))
    weights = dtheta / np.sqrt(s_left * s_right)
    log_ratio = np.log(s_right) - np.log(s_left)
    sums = _phase_sums(thetas, weights, log_ratio, lam, k_min, k_max)
    k0 = k0_formula(t1, t2, lam)
    return 1j * k0 * sums


@dataclass(frozen=True)
class QuadratureTable:
    """Moment tables over k = -N-1..N plus the constants that built them."""

    c11: np.ndarray
    c12: np.ndarray
    N: int
    M1: int
    M2: int
    K0: complex

    def c11_at(self, k: int) -> complex:
        return complex(self.c11[k + self.N + 1])

    def c12_at(self, k: int) -> complex:
        return complex(self.c12[k + self.N + 1])


def build_quadrature(
    spec: ProblemSpec, params: ContinuationParams, N: int, M1: int, M2: int
) -> QuadratureTable:
    """Both moment tables for k = -N-1..N."""
    return QuadratureTable(
        c11=c11_table(spec, params, N, M1),
        c12=c12_table(spec, params, N, M2),
        N=N,
        M1=M1,
        M2=M2,
        K0=k0_constant(spec, params),
    )
