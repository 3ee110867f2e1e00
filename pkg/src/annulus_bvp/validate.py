"""Post-solve verification: identities the solved coefficients must satisfy.

Everything here is read-only over solver output; no check feeds back into
solving, so a run's determinism stays auditable. The checks fall into
three groups:

  * construction identities of route 1 (single-valuedness, resultant
    balance, closed-form A_{-1} and B_{-1}, the inner-boundary rows),
    which hold to solver precision;
  * quadrature identities (moment-table ratios against the series
    coefficients, arc closure and resultant sums), which hold to the
    accuracy of the moment tables and tighten as the point counts grow;
  * cross-route agreement of the coefficients and of sampled fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fields
from .model import ContinuationParams, ProblemSpec
from .quadrature import QuadratureTable, c12_table
from .series import TaylorCoefficients
from .solver1 import harmonic_array


def check_single_valuedness(sol: fields.SeriesSolution) -> float:
    """|kappa*A_{-1} + B_{-1}| / (1 + |A_{-1}|): zero for single-valued
    displacement."""
    kap = sol.spec.kappa()
    return abs(kap * sol.a_at(-1) + sol.b_at(-1)) / (1.0 + abs(sol.a_at(-1)))


def check_resultant(sol: fields.SeriesSolution) -> float:
    """Residual of the resultant balance r^{-1}(A_{-1} - B_{-1}) = p_{-1} + i q_{-1}."""
    f_res = sol.spec.traction.value(-1)
    return abs((sol.a_at(-1) - sol.b_at(-1)) / sol.spec.r - f_res)


def closed_form_error(sol: fields.SeriesSolution) -> float:
    """Distance of (A_{-1}, B_{-1}) from their closed forms
    (p_{-1}+iq_{-1}) r / (1+kappa) and -kappa (p_{-1}+iq_{-1}) r / (1+kappa)."""
    kap = sol.spec.kappa()
    f_res = sol.spec.traction.value(-1)
    a_exact = f_res * sol.spec.r / (1.0 + kap)
    return max(abs(sol.a_at(-1) - a_exact), abs(sol.b_at(-1) + kap * a_exact))


def constraint_rows_residual(sol: fields.SeriesSolution) -> float:
    """Worst residual of the truncated inner-boundary rows.

    Row at harmonic k (k <= -2 or 0 <= k <= N-1):
        A_k r^k + (k+1)(1 - r^{-2}) r^{-k} conj(A_{-k}) - B_k r^{-k-2} = p_k + i q_k
    """
    spec = sol.spec
    N = sol.N
    r = spec.r
    one_m = 1.0 - r**-2
    f = harmonic_array(spec, N)
    ks = np.array([k for k in range(-N, N) if k != -1])
    lhs = (
        sol.A[N + ks] * r ** ks.astype(float)
        + (ks + 1) * one_m * r ** (-ks.astype(float)) * np.conj(sol.A[N - ks])
        - sol.B[N + ks] * r ** (-ks.astype(float) - 2)
    )
    return float(np.max(np.abs(lhs - f[N + ks])))


@dataclass
class SRatioSuite:
    """Componentwise ratios of moment-table entries to series coefficients.

    For each order l, S1/S2 are the real/imaginary ratios that should equal
    -1 (clamped-arc moments against alpha) and S3/S4 the ratios that should
    equal +1 (against beta). Components whose denominator magnitude falls
    below ``skip_threshold`` are exact symmetry zeros and recorded as NaN.
    """

    orders: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    s4: np.ndarray
    skipped: int
    skip_threshold: float

    def worst_deviation(self) -> float:
        """Largest |S - target| over all defined components."""
        worst = 0.0
        for arr, target in ((self.s1, -1.0), (self.s2, -1.0), (self.s3, 1.0), (self.s4, 1.0)):
            finite = arr[np.isfinite(arr)]
            if finite.size:
                worst = max(worst, float(np.max(np.abs(finite - target))))
        return worst


def check_c12_identity(
    spec: ProblemSpec,
    params: ContinuationParams,
    coeffs: TaylorCoefficients,
    M2: int,
    max_order: int = 20,
    skip_threshold: float = 1e-9,
) -> SRatioSuite:
    """Ratio suite comparing clamped-arc moments against the series.

    The exact identities (same-period branch) are
        c12_{-1-l} = -(2 pi i kappa / (1+kappa)) alpha_l,   l >= 0
        c12_{-1+l} = +(2 pi i kappa / (1+kappa)) beta_l,    l >= 1
    so S1, S2 -> -1 and S3, S4 -> +1 as M2 grows.
    """
    kap = spec.kappa()
    scale = 2j * math.pi * kap / (1.0 + kap)
    c12 = c12_table(spec, params, coeffs.N, M2, k_min=-1 - max_order, k_max=-1 + max_order)
    offset = 1 + max_order

    orders = np.arange(max_order + 1)
    s1 = np.full(max_order + 1, np.nan)
    s2 = np.full(max_order + 1, np.nan)
    s3 = np.full(max_order + 1, np.nan)
    s4 = np.full(max_order + 1, np.nan)
    skipped = 0

    for l in orders:
        num = scale * coeffs.alpha[l]
        den = c12[offset - 1 - l]
        if abs(den.real) >= skip_threshold:
            s1[l] = num.real / den.real
        else:
            skipped += 1
        if abs(den.imag) >= skip_threshold:
            s2[l] = num.imag / den.imag
        else:
            skipped += 1
        if l >= 1:
            num = scale * coeffs.beta[l]
            den = c12[offset - 1 + l]
            if abs(den.real) >= skip_threshold:
                s3[l] = num.real / den.real
            else:
                skipped += 1
            if abs(den.imag) >= skip_threshold:
                s4[l] = num.imag / den.imag
            else:
                skipped += 1
    return SRatioSuite(
        orders=orders,
        s1=s1,
        s2=s2,
        s3=s3,
        s4=s4,
        skipped=skipped,
        skip_threshold=skip_threshold,
    )


def compare_solutions(
    sol_a: fields.SeriesSolution, sol_b: fields.SeriesSolution
) -> float:
    """max_k |d_k^(a) - d_k^(b)| / max_k |d_k^(a)|; zero-traction guarded."""
    scale = float(np.max(np.abs(sol_a.d)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(sol_a.d - sol_b.d))) / scale


def check_c11_closure(
    sol: fields.SeriesSolution, quad: QuadratureTable
) -> tuple[complex, float]:
    """Free-arc closure sum_k c11_k d_k: exact value is zero.

    Returns (sum, |sum| relative to the largest summand magnitude).
    """
    terms = quad.c11[1:] * sol.d
    total = complex(np.sum(terms))
    scale = float(np.max(np.abs(terms)))
    return total, (abs(total) / scale if scale > 0 else 0.0)


def check_c12_resultant(
    sol: fields.SeriesSolution, quad: QuadratureTable
) -> float:
    """Clamped-arc resultant sum_k c12_k d_k against its closed form
    -(2 pi i kappa/(1+kappa)) (p_{-1}+iq_{-1}) r, relative to the largest
    summand magnitude."""
    kap = sol.spec.kappa()
    target = -2j * math.pi * kap / (1.0 + kap) * sol.spec.traction.value(-1) * sol.spec.r
    terms = quad.c12[1:] * sol.d
    scale = float(np.max(np.abs(terms)))
    if scale == 0.0:
        return 0.0 if target == 0 else abs(target)
    return abs(complex(np.sum(terms)) - target) / scale


def boundary_residuals(
    sol: fields.SeriesSolution,
    samples: int = 720,
    exclusion_deg: float = 5.0,
    rigid: fields.RigidBody | None = None,
) -> tuple[float, float, float]:
    """(inner, free, fixed) boundary residuals, each relative to its scale.

    inner: max |(Sigma_rho + i Sigma_rhotheta)(r, theta) - f(theta)| over a
    full circle, relative to max |f|. free: max traction magnitude on the
    free-arc interior at rho = 1, relative to max |f|. fixed: max |U + iV|
    on the clamped-arc interior, relative to the largest boundary
    displacement magnitude.
    """
    spec = sol.spec
    thetas = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    f_vals = np.array([spec.traction.eval_at(t) for t in thetas])
    f_max = float(np.max(np.abs(f_vals)))
    if f_max == 0.0:
        return 0.0, 0.0, 0.0

    _, s_rho, s_rt = fields.stress_on_circle(sol, spec.r, thetas)
    inner = float(np.max(np.abs(s_rho + 1j * s_rt - f_vals))) / f_max

    free_th = fields.free_arc_angles(spec, samples, exclusion_deg)
    _, s_rho, s_rt = fields.stress_on_circle(sol, 1.0, free_th)
    free = float(np.max(np.abs(s_rho + 1j * s_rt))) / f_max

    if rigid is None:
        rigid = fields.rigid_body_constant(sol)
    clamp_th = fields.clamped_arc_angles(spec, samples, exclusion_deg)
    w_clamp = fields.displacement_complex_on_circle(sol, 1.0, clamp_th, rigid)
    w_all = fields.displacement_complex_on_circle(sol, 1.0, thetas, rigid)
    w_scale = float(np.max(np.abs(w_all)))
    fixed = float(np.max(np.abs(w_clamp))) / w_scale if w_scale > 0 else 0.0
    return inner, free, fixed


def field_grid_difference(
    sol_a: fields.SeriesSolution,
    sol_b: fields.SeriesSolution,
    grid: int = 24,
) -> float:
    """Largest pointwise field difference on a grid x grid (rho, theta)
    lattice, relative to the largest field magnitude of the first solution."""
    spec = sol_a.spec
    rhos = np.linspace(spec.r, 1.0, grid)
    thetas = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    rigid_a = fields.rigid_body_constant(sol_a)
    rigid_b = fields.rigid_body_constant(sol_b)
    worst = 0.0
    scale = 0.0
    for rho in rhos:
        sa = np.array(fields.stress_on_circle(sol_a, rho, thetas))
        sb = np.array(fields.stress_on_circle(sol_b, rho, thetas))
        wa = fields.displacement_complex_on_circle(sol_a, rho, thetas, rigid_a)
        wb = fields.displacement_complex_on_circle(sol_b, rho, thetas, rigid_b)
        worst = max(worst, float(np.max(np.abs(sa - sb))), float(np.max(np.abs(wa - wb))))
        scale = max(scale, float(np.max(np.abs(sa))), float(np.max(np.abs(wa))))
    return worst / scale if scale > 0 else 0.0


@dataclass
class SolutionChecks:
    """Scalar residuals of one solution route."""

    single_valuedness: float
    resultant: float
    closed_form: float
    constraint_rows: float
    c11_closure_rel: float
    c12_resultant_rel: float
    boundary_inner: float
    boundary_free: float
    boundary_fixed: float


@dataclass
class ValidationReport:
    """All checks for one problem, possibly covering both solution routes."""

    label: str
    checks: dict[str, SolutionChecks] = field(default_factory=dict)
    s_ratios: SRatioSuite | None = None
    cross_solution_max_diff: float | None = None
    field_grid_max_diff: float | None = None


def solution_checks(
    sol: fields.SeriesSolution, quad: QuadratureTable, samples: int = 720
) -> SolutionChecks:
    inner, free, fixed = boundary_residuals(sol, samples)
    _, closure_rel = check_c11_closure(sol, quad)
    return SolutionChecks(
        single_valuedness=check_single_valuedness(sol),
        resultant=check_resultant(sol),
        closed_form=closed_form_error(sol),
        constraint_rows=constraint_rows_residual(sol),
        c11_closure_rel=closure_rel,
        c12_resultant_rel=check_c12_resultant(sol, quad),
        boundary_inner=inner,
        boundary_free=free,
        boundary_fixed=fixed,
    )


def format_report(report: ValidationReport) -> str:
    """Deterministic plain-text rendering of a validation report."""
    lines = [f"validation report: {report.label}", "=" * (20 + len(report.label))]
    for name in sorted(report.checks):
        c = report.checks[name]
        lines.append(f"[{name}]")
        lines.append(f"  single-valuedness residual   = {c.single_valuedness:.6e}")
        lines.append(f"  resultant-balance residual   = {c.resultant:.6e}")
        lines.append(f"  closed-form A/B error        = {c.closed_form:.6e}")
        lines.append(f"  worst inner-row residual     = {c.constraint_rows:.6e}")
        lines.append(f"  free-arc closure (relative)  = {c.c11_closure_rel:.6e}")
        lines.append(f"  clamped-arc resultant (rel)  = {c.c12_resultant_rel:.6e}")
        lines.append(f"  boundary residual inner      = {c.boundary_inner:.6e}")
        lines.append(f"  boundary residual free arc   = {c.boundary_free:.6e}")
        lines.append(f"  boundary residual fixed arc  = {c.boundary_fixed:.6e}")
    if report.cross_solution_max_diff is not None:
        lines.append(f"cross-solution max |d| diff (rel) = {report.cross_solution_max_diff:.6e}")
    if report.field_grid_max_diff is not None:
        lines.append(f"cross-solution field diff (rel)   = {report.field_grid_max_diff:.6e}")
    if report.s_ratios is not None:
        s = report.s_ratios
        lines.append(
            f"moment-identity ratios (skipped {s.skipped} symmetry-zero components, "
            f"threshold {s.skip_threshold:g}):"
        )
        lines.append("   l        S1        S2        S3        S4")
        for i, l in enumerate(s.orders):
            def cell(v: float) -> str:
                return f"{v:9.4f}" if np.isfinite(v) else "        -"
            lines.append(
                f"  {l:2d} {cell(s.s1[i])} {cell(s.s2[i])} {cell(s.s3[i])} {cell(s.s4[i])}"
            )
        lines.append(f"worst |S - target| = {s.worst_deviation():.4e}")
    return "\n".join(lines) + "\n"
