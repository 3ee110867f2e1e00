"""Problem definition for the partially clamped annulus.

The domain is the unit annulus r <= rho <= 1. An arc of the outer circle
between the angles theta1 and theta2 (counterclockwise from theta1) is fully
clamped; the rest of the outer circle is traction free. The inner circle
carries a prescribed traction given by a finite Fourier spectrum.

All outputs downstream are normalized: stresses by the shear modulus G and
displacements by the outer radius, so G and the outer radius never appear
explicitly (both are fixed at 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

PLANE_STRAIN = "plane_strain"
PLANE_STRESS = "plane_stress"

PRINCIPAL = "principal"
SHIFTED = "shifted"


def kolosov_constant(nu: float, plane_condition: str) -> float:
    """Kolosov constant: 3 - 4*nu (plane strain) or (3-nu)/(1+nu) (plane stress)."""
    if plane_condition == PLANE_STRAIN:
        return 3.0 - 4.0 * nu
    if plane_condition == PLANE_STRESS:
        return (3.0 - nu) / (1.0 + nu)
    raise ValueError(f"unknown plane condition: {plane_condition!r}")


@dataclass(frozen=True)
class TractionSpectrum:
    """Finite Fourier spectrum of the inner-boundary traction.

    ``coefficients`` maps an integer harmonic k to the complex amplitude
    p_k + i*q_k (radial + i*tangential, normalized by G). Absent harmonics
    read as exactly zero. The traction value at angle theta is
    sum_k (p_k + i*q_k) * exp(i*k*theta).
    """

    coefficients: dict[int, complex] = field(default_factory=dict)

    def value(self, k: int) -> complex:
        return complex(self.coefficients.get(k, 0.0))

    def harmonics(self) -> list[int]:
        """Harmonics with a nonzero stored amplitude, sorted."""
        return sorted(k for k, c in self.coefficients.items() if c != 0)

    def max_order(self) -> int:
        ks = self.harmonics()
        return max((abs(k) for k in ks), default=0)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coefficients.values()), default=0.0)

    def eval_at(self, theta: float) -> complex:
        return sum(
            (c * cmath.exp(1j * k * theta) for k, c in self.coefficients.items()),
            complex(0.0),
        )


def traction_eval(traction: TractionSpectrum, theta: float) -> complex:
    """Evaluate the traction Fourier sum at angle ``theta`` (radians)."""
    return traction.eval_at(theta)


@dataclass(frozen=True)
class ProblemSpec:
    """Geometry, material and loading of one annulus problem.

    Parameters
    ----------
    nu : float
        Poisson ratio, in the open interval (0, 0.5).
    plane_condition : str
        ``"plane_strain"`` or ``"plane_stress"``.
    r : float
        Inner/outer radius ratio, 0 < r < 1 (outer radius normalized to 1).
    theta1, theta2 : float
        Angles (radians) of the clamped-arc endpoints t1 = e^{i*theta1},
        t2 = e^{i*theta2}; must satisfy theta1 < theta2 < theta1 + 2*pi.
        The clamped arc runs counterclockwise from theta1 to theta2.
    traction : TractionSpectrum
        Inner-boundary traction spectrum.
    """

    nu: float
    plane_condition: str
    r: float
    theta1: float
    theta2: float
    traction: TractionSpectrum = field(default_factory=TractionSpectrum)

    def __post_init__(self) -> None:
        if not 0.0 < self.nu < 0.5:
            raise ValueError(f"nu out of range (0, 0.5): {self.nu}")
        if self.plane_condition not in (PLANE_STRAIN, PLANE_STRESS):
            raise ValueError(f"unknown plane condition: {self.plane_condition!r}")
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"radius ratio out of range (0, 1): {self.r}")
        if not self.theta1 < self.theta2 < self.theta1 + 2.0 * math.pi:
            raise ValueError(
                "angles must satisfy theta1 < theta2 < theta1 + 2*pi, got "
                f"theta1={self.theta1}, theta2={self.theta2}"
            )

    def kappa(self) -> float:
        return kolosov_constant(self.nu, self.plane_condition)

    @property
    def t1(self) -> complex:
        return cmath.exp(1j * self.theta1)

    @property
    def t2(self) -> complex:
        return cmath.exp(1j * self.theta2)

    def free_arc_length(self) -> float:
        return 2.0 * math.pi - (self.theta2 - self.theta1)


def kappa(spec: ProblemSpec) -> float:
    """Kolosov constant of the spec's material and plane condition."""
    return spec.kappa()


@dataclass(frozen=True)
class ContinuationParams:
    """Branch data for the fractional powers in the series expansions.

    gamma = 1/2 + i*lambda with lambda = ln(kappa) / (2*pi). ``branch``
    selects which 2*pi period of the argument is used when raising t1, t2
    to fractional powers: ``"principal"`` uses the stored angles as given
    (the presets keep them in [-pi, pi)), ``"shifted"`` moves both angles
    up by one period.
    """

    gamma: complex
    lam: float
    branch: str = PRINCIPAL

    def __post_init__(self) -> None:
        if self.branch not in (PRINCIPAL, SHIFTED):
            raise ValueError(f"unknown branch: {self.branch!r}")

    @property
    def period_index(self) -> int:
        """Integer n of the period [-pi + 2*n*pi, pi + 2*n*pi) in use."""
        return 0 if self.branch == PRINCIPAL else 1

    @property
    def angle_shift(self) -> float:
        return 2.0 * math.pi * self.period_index


@dataclass(frozen=True)
class SolverConfig:
    """Truncation, tolerance and quadrature sizes for one solver run.

    epsilon is the absolute stopping threshold on max |d_k| of one
    iteration increment; the increments decay geometrically toward true
    zero, so thresholds far below machine epsilon (the default 1e-20)
    are reachable in double precision.
    """

    N: int = 60
    epsilon: float = 1e-20
    max_reps: int = 2000
    M1: int = 30_000
    M2: int = 10_000
    sign_flip: bool = True

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError(f"truncation order N must be >= 2, got {self.N}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_reps < 1:
            raise ValueError(f"max_reps must be >= 1, got {self.max_reps}")
        if self.M1 < 100 or self.M2 < 100:
            raise ValueError(f"M1, M2 must be >= 100, got {self.M1}, {self.M2}")


#: Benchmark cases: radius ratio, clamped-arc angles, traction harmonic,
#: quadrature sizes, and the mid sampling circle used for reporting.
_CASE_TABLE = {
    "A": dict(r=0.1, theta2=0.0, harmonic=(-1, 1j), M1=30_000, M2=10_000, r_mid=0.3),
    "B": dict(r=0.3, theta2=math.pi / 2, harmonic=(-1, 1.0), M1=20_000, M2=20_000, r_mid=0.5),
    "C": dict(r=0.5, theta2=0.0, harmonic=(0, 1.0), M1=30_000, M2=10_000, r_mid=0.7),
    "D": dict(r=0.7, theta2=math.pi / 2, harmonic=(0, 1j), M1=20_000, M2=20_000, r_mid=0.9),
}

CASE_IDS = tuple(_CASE_TABLE)


def build_case_preset(case_id: str) -> tuple[ProblemSpec, SolverConfig]:
    """Return the benchmark case ``case_id`` in {"A", "B", "C", "D"}.

    All four cases use nu = 0.3 in plane strain, N = 60, theta1 = -pi/2 and
    a single unit traction harmonic; they differ in radius ratio, clamped
    arc extent, the loaded harmonic and quadrature sizes.
    """
    try:
        row = _CASE_TABLE[case_id]
    except KeyError:
        raise ValueError(f"unknown case id: {case_id!r}") from None
    k, amp = row["harmonic"]
    spec = ProblemSpec(
        nu=0.3,
        plane_condition=PLANE_STRAIN,
        r=row["r"],
        theta1=-math.pi / 2,
        theta2=row["theta2"],
        traction=TractionSpectrum({k: complex(amp)}),
    )
    config = SolverConfig(N=60, M1=row["M1"], M2=row["M2"])
    return spec, config


def preset_sample_radii(case_id: str) -> tuple[float, float, float]:
    """Sampling circles (inner, mid, outer) used to report each benchmark case."""
    row = _CASE_TABLE[case_id]
    return (row["r"], row["r_mid"], 1.0)
