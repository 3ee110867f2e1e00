"""Assembled series solution and pointwise stress/displacement evaluation.

Once the coefficients d_k are known, the two potentials exist only through
the assembled arrays

    A_k = sum_{l=0}^{N+k} alpha_l d_{k-l}        (inner expansion)
    B_k = sum_{l=1}^{N-k} beta_l d_{k+l}         (outer expansion)

for |k| <= N. Field evaluation applies the Lanczos sigma factor
F(k) = sin(|k| pi / N) / (|k| pi / N) to every harmonic to damp the Gibbs
oscillation of the hard truncation.

Outputs are normalized: stresses by the shear modulus, displacements by
the outer radius. Values follow the raw analytic sign convention; callers
wanting the opposite (finite-element style) convention negate all field
components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ProblemSpec
from .series import TaylorCoefficients


def lanczos_filter(k: int, N: int) -> float:
    """Sigma factor for harmonic k at truncation order N: 1 at k = 0,
    sin(|k| pi / N) / (|k| pi / N) otherwise; 0 at |k| = N."""
    if abs(k) > N:
        raise ValueError(f"|k| = {abs(k)} exceeds truncation order N = {N}")
    if k == 0:
        return 1.0
    if abs(k) == N:
        return 0.0  # sin(pi) exactly
    x = abs(k) * math.pi / N
    return math.sin(x) / x


def _filter_array(N: int) -> np.ndarray:
    F = np.sinc(np.arange(-N, N + 1) / N)
    F[0] = F[-1] = 0.0
    return F


@dataclass(frozen=True)
class SeriesSolution:
    """Solved coefficients and their assembled expansions, index k + N."""

    d: np.ndarray
    A: np.ndarray
    B: np.ndarray
    N: int
    spec: ProblemSpec

    def a_at(self, k: int) -> complex:
        return complex(self.A[k + self.N])

    def b_at(self, k: int) -> complex:
        return complex(self.B[k + self.N])

    def d_at(self, k: int) -> complex:
        return complex(self.d[k + self.N])


@dataclass(frozen=True)
class RigidBody:
    """Normalized rigid-body translation removed from the displacement field."""

    Dx: float = 0.0
    Dy: float = 0.0

    @property
    def shift(self) -> complex:
        return complex(self.Dx, self.Dy)


def assemble_solution(
    d: np.ndarray, coeffs: TaylorCoefficients, spec: ProblemSpec
) -> SeriesSolution:
    """Assemble A_k, B_k from the coefficient vector d (index k + N)."""
    N = coeffs.N
    if d.shape[0] != 2 * N + 1:
        raise ValueError(f"d must have length {2 * N + 1}, got {d.shape[0]}")
    A = np.convolve(coeffs.alpha, d)[: 2 * N + 1]
    B = np.convolve(coeffs.beta, d[::-1])[: 2 * N + 1][::-1]
    return SeriesSolution(d=np.asarray(d, dtype=complex), A=A, B=B, N=N, spec=spec)


def _check_radius(sol: SeriesSolution, rho: float) -> None:
    r = sol.spec.r
    if not (r - 1e-12 <= rho <= 1.0 + 1e-12):
        raise ValueError(f"rho = {rho} outside the annulus [{r}, 1]")


def stress_on_circle(
    sol: SeriesSolution, rho: float, thetas: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Sigma_theta, Sigma_rho, Sigma_rhotheta) at radius rho, angles thetas.

    The combination Sigma_rho + i*Sigma_rhotheta is one filtered harmonic
    sum; Sigma_theta comes from the trace sum 4*Re(phi') minus Sigma_rho.
    """
    _check_radius(sol, rho)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    N = sol.N
    ks = np.arange(-N, N + 1)
    F = _filter_array(N)
    rho_k = rho**ks.astype(float)

    trace_coef = F * sol.A * rho_k
    radial_coef = F * (
        sol.A * rho_k
        + (ks + 1) * (1.0 - rho**-2) * rho ** (-ks.astype(float)) * np.conj(sol.A[::-1])
        - rho ** (-ks.astype(float) - 2) * sol.B
    )
    phases = np.exp(1j * np.outer(ks, thetas))
    trace = 4.0 * np.real(trace_coef @ phases)
    radial_shear = radial_coef @ phases
    sigma_rho = np.real(radial_shear)
    sigma_rhotheta = np.imag(radial_shear)
    sigma_theta = trace - sigma_rho
    return sigma_theta, sigma_rho, sigma_rhotheta


def stress_at(
    sol: SeriesSolution, rho: float, theta: float
) -> tuple[float, float, float]:
    """Normalized (Sigma_theta, Sigma_rho, Sigma_rhotheta) at one point."""
    st, sr, srt = stress_on_circle(sol, rho, np.array([theta]))
    return float(st[0]), float(sr[0]), float(srt[0])


def displacement_complex_on_circle(
    sol: SeriesSolution, rho: float, thetas: np.ndarray, rigid: RigidBody | None = None
) -> np.ndarray:
    """U + iV at radius rho and the given angles (normalized by 2*G*r_o = 2).

    Three harmonic families: e^{i(k+1)theta} for k = 0..N, a theta-constant
    group carrying the log term (filtered by F(1)), and e^{i(1-k)theta} for
    k = 2..N. The rigid-body translation, if given, is subtracted last.
    """
    _check_radius(sol, rho)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    N = sol.N
    kap = sol.spec.kappa()
    F = _filter_array(N)
    one_m = 1.0 - rho**-2

    ks = np.arange(0, N + 1)
    coef_up = (F[N + ks] / 2.0) * (
        kap * sol.A[N + ks] * rho ** (ks + 1.0) / (ks + 1)
        - np.conj(sol.A[N - ks]) * rho ** (1.0 - ks) * one_m
        + sol.B[N + ks] * rho ** (-ks - 1.0) / (ks + 1)
    )
    out = coef_up @ np.exp(1j * np.outer(ks + 1, thetas))

    log_group = (F[N + 1] / 2.0) * (
        (kap * sol.a_at(-1) - sol.b_at(-1)) * math.log(rho)
        - np.conj(sol.a_at(1)) * rho**2
    )
    out = out + log_group

    ks = np.arange(2, N + 1)
    coef_dn = (F[N + ks] / 2.0) * (
        kap * sol.A[N - ks] * rho ** (1.0 - ks) / (1 - ks)
        - np.conj(sol.A[N + ks]) * rho ** (ks + 1.0) * one_m
        - sol.B[N - ks] * rho ** (ks - 1.0) / (ks - 1)
    )
    out = out + coef_dn @ np.exp(1j * np.outer(1 - ks, thetas))

    if rigid is not None:
        out = out - rigid.shift
    return out


def displacement_at(
    sol: SeriesSolution, rigid: RigidBody, rho: float, theta: float
) -> tuple[float, float]:
    """Normalized (U, V) at one point, rigid-body translation removed."""
    w = displacement_complex_on_circle(sol, rho, np.array([theta]), rigid)
    return float(w[0].real), float(w[0].imag)


def clamped_arc_angles(
    spec: ProblemSpec, samples: int, exclusion_deg: float = 5.0
) -> np.ndarray:
    """Equally spaced angles on the clamped arc, excluding end zones."""
    pad = math.radians(exclusion_deg)
    lo, hi = spec.theta1 + pad, spec.theta2 - pad
    if not lo < hi:
        raise ValueError(
            f"clamped arc [{spec.theta1}, {spec.theta2}] shorter than twice "
            f"the {exclusion_deg} degree exclusion zone"
        )
    return np.linspace(lo, hi, samples)


def free_arc_angles(
    spec: ProblemSpec, samples: int, exclusion_deg: float = 5.0
) -> np.ndarray:
    """Equally spaced angles on the free arc, excluding end zones."""
    pad = math.radians(exclusion_deg)
    lo, hi = spec.theta2 + pad, spec.theta1 + 2.0 * math.pi - pad
    if not lo < hi:
        raise ValueError(
            f"free arc shorter than twice the {exclusion_deg} degree exclusion zone"
        )
    return np.linspace(lo, hi, samples)


def rigid_body_constant(
    sol: SeriesSolution, samples: int = 360, exclusion_deg: float = 5.0
) -> RigidBody:
    """Translation making the clamped arc's mean displacement zero.

    The series itself does not fix the additive constant, so it is chosen
    as the mean of the unshifted displacement over the clamped arc interior
    (end zones excluded: the endpoints are singular by construction).
    """
    angles = clamped_arc_angles(sol.spec, samples, exclusion_deg)
    w = displacement_complex_on_circle(sol, 1.0, angles)
    mean = complex(np.mean(w))
    return RigidBody(Dx=mean.real, Dy=mean.imag)
