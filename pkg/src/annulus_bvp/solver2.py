"""Second solution route: quadrature-constrained successive approximation.

Route 2 never pins A_{-1}, B_{-1} through the residue shortcut. Instead it
keeps the expansion domains intact and closes the constraint set with two
arc conditions: the resultant row (shared with route 1) and the free-arc
closure sum_k c11_k d_k = 0 built from the numerically integrated free-arc
moments. Each sweep therefore has two sub-steps:

  1. solve the (N-1)-sized alpha system for d_{-2}..d_{-N} and the N-sized
     beta system for d_1..d_N from the previous increment's feedback;
  2. solve a fixed 2 x 2 system (rows: resultant balance, free-arc
     closure) for d_{-1} and d_0 from the sub-step-1 values.

The outer-expansion feedback here tracks B_{-1} as well (its k = 1 beta
row consumes conj(B_{-1}) of the previous increment), which route 1 never
needs. The same traction sign convention as route 1 applies.
"""

from __future__ import annotations

import numpy as np

from .fields import SeriesSolution, assemble_solution
from .linalg import SingularMatrixError, solve_upper_toeplitz, toeplitz_upper
from .model import ProblemSpec, SolverConfig
from .quadrature import QuadratureTable, build_quadrature
from .series import TaylorCoefficients, continuation_params, taylor_coefficients
from .solver1 import (
    ConvergenceError,
    IterationReport,
    IterationState,
    LinearSystems,
    expansion_values,
    harmonic_array,
)


def assemble_systems2(coeffs: TaylorCoefficients, N: int) -> LinearSystems:
    """Route-2 systems: (N-1) x (N-1) in alpha over d_{-2}..d_{-N}, and
    N x N in beta over d_1..d_N."""
    alpha_band = coeffs.alpha[: N - 1]
    beta_band = coeffs.beta[1 : N + 1]
    return LinearSystems(
        alpha_band=alpha_band,
        beta_band=beta_band,
        alpha_dense=toeplitz_upper(alpha_band, N - 1),
        beta_dense=toeplitz_upper(beta_band, N),
    )


def corner_matrix(coeffs: TaylorCoefficients, quad: QuadratureTable) -> np.ndarray:
    """The fixed 2 x 2 system over (d_{-1}, d_0): resultant row and
    free-arc closure row. Iteration invariant, so factored once."""
    N = quad.N
    return np.array(
        [
            [coeffs.alpha[0], -coeffs.beta[1]],
            [quad.c11[N], quad.c11[N + 1]],
        ],
        dtype=complex,
    )


def _corner_rhs(
    step: np.ndarray,
    coeffs: TaylorCoefficients,
    quad: QuadratureTable,
    N: int,
    traction_term: complex,
) -> np.ndarray:
    """Right-hand side of the 2 x 2 corner system for one increment.

    ``step`` holds the sub-step-1 increment with d_{-1} = d_0 = 0. The
    closure sums run over |l| <= N only (series truncation).
    """
    # alpha_0 d_{-1} - beta_1 d_0 = -sum_{l>=1} alpha_l d_{-1-l}
    #                               + sum_{l>=2} beta_l d_{-1+l} + r f_{-1}
    ls = np.arange(1, N)
    row1 = -np.dot(coeffs.alpha[ls], step[N - 1 - ls])
    ls = np.arange(2, N + 2)
    row1 += np.dot(coeffs.beta[ls], step[N - 1 + ls])
    row1 += traction_term
    # c11_{-1} d_{-1} + c11_0 d_0 = -sum_{l>=2} c11_{-l} d_{-l} - sum_{l>=1} c11_l d_l
    off = N + 1
    ls = np.arange(2, N + 1)
    row2 = -np.dot(quad.c11[off - ls], step[N - ls])
    ls = np.arange(1, N + 1)
    row2 -= np.dot(quad.c11[off + ls], step[N + ls])
    return np.array([row1, row2], dtype=complex)


def _traction_rhs2(
    spec: ProblemSpec, f: np.ndarray, N: int
) -> tuple[np.ndarray, np.ndarray]:
    """Traction right-hand sides of the first route-2 sweep."""
    r = spec.r
    one_m = 1.0 - r**-2
    ks = np.arange(2, N + 1)
    rhs_a = (r**ks * f[N - ks]).astype(complex)  # rows k = 2..N

    rhs_b = np.zeros(N, dtype=complex)  # rows k = 0..N-1
    rhs_b[0] = -(r**2) * f[N]
    ks = np.arange(1, N)
    rhs_b[1:] = (ks + 1) * one_m * r ** (ks + 2) * np.conj(f[N - ks]) - r ** (
        ks + 2
    ) * f[N + ks]
    return rhs_a, rhs_b


def _lag_rhs2(
    A_prev: np.ndarray, B_prev: np.ndarray, spec: ProblemSpec, N: int
) -> tuple[np.ndarray, np.ndarray]:
    """Feedback right-hand sides of later route-2 sweeps."""
    r = spec.r
    one_m = 1.0 - r**-2
    ks = np.arange(2, N + 1)
    rhs_a = (ks - 1) * one_m * r ** (2 * ks) * np.conj(A_prev[N + ks]) + r ** (
        2 * ks - 2
    ) * B_prev[N - ks]

    rhs_b = np.zeros(N, dtype=complex)
    rhs_b[0] = r**2 * A_prev[N] + one_m * r**2 * np.conj(A_prev[N])
    rhs_b[1] = r**4 * A_prev[N + 1] + 2.0 * one_m * r**2 * np.conj(B_prev[N - 1])
    ks = np.arange(2, N)
    rhs_b[2:] = (
        r ** (2 * ks + 2) * A_prev[N + ks]
        + (ks**2 - 1) * one_m**2 * r ** (2 * ks + 2) * A_prev[N + ks]
        + (ks + 1) * one_m * r ** (2 * ks) * np.conj(B_prev[N - ks])
    )
    return rhs_a, rhs_b


def _solve_sweep2(
    systems: LinearSystems,
    coeffs: TaylorCoefficients,
    quad: QuadratureTable,
    corner_inv: np.ndarray,
    rhs_a: np.ndarray,
    rhs_b: np.ndarray,
    N: int,
    traction_term: complex,
) -> np.ndarray:
    x = solve_upper_toeplitz(systems.alpha_band, rhs_a)  # d_{-2}..d_{-N}
    y = solve_upper_toeplitz(systems.beta_band, rhs_b)  # d_1..d_N
    step = np.zeros(2 * N + 1, dtype=complex)
    step[: N - 1] = x[::-1]
    step[N + 1 :] = y
    corner = corner_inv @ _corner_rhs(step, coeffs, quad, N, traction_term)
    step[N - 1] = corner[0]  # d_{-1}
    step[N] = corner[1]  # d_0
    return step


def initial_step2(
    spec: ProblemSpec,
    systems: LinearSystems,
    coeffs: TaylorCoefficients,
    quad: QuadratureTable,
    N: int,
) -> IterationState:
    f = harmonic_array(spec, N)
    rhs_a, rhs_b = _traction_rhs2(spec, f, N)
    corner_inv = _invert_corner(coeffs, quad)
    step = _solve_sweep2(
        systems, coeffs, quad, corner_inv, rhs_a, rhs_b, N, spec.r * f[N - 1]
    )
    A_step, B_step = expansion_values(step, coeffs, N)
    return IterationState(d=step.copy(), d_step=step, A_step=A_step, B_step=B_step)


def iterate_once2(
    state: IterationState,
    spec: ProblemSpec,
    systems: LinearSystems,
    coeffs: TaylorCoefficients,
    quad: QuadratureTable,
    N: int,
) -> IterationState:
    rhs_a, rhs_b = _lag_rhs2(state.A_step, state.B_step, spec, N)
    corner_inv = _invert_corner(coeffs, quad)
    step = _solve_sweep2(systems, coeffs, quad, corner_inv, rhs_a, rhs_b, N, 0.0)
    A_step, B_step = expansion_values(step, coeffs, N)
    return IterationState(
        d=state.d + step, d_step=step, A_step=A_step, B_step=B_step, q=state.q + 1
    )


def _invert_corner(
    coeffs: TaylorCoefficients, quad: QuadratureTable
) -> np.ndarray:
    M = corner_matrix(coeffs, quad)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) <= 1e-14 * max(abs(M).max(), 1.0) ** 2:
        raise SingularMatrixError(
            "corner system singular: degenerate arc configuration"
        )
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=complex) / det


def run2(
    spec: ProblemSpec,
    config: SolverConfig,
    quad: QuadratureTable | None = None,
) -> tuple[SeriesSolution, IterationReport]:
    """Iterate route 2 to the stopping tolerance and assemble the solution.

    ``quad`` may be supplied to reuse a prebuilt moment table; it must have
    been built with the same truncation order.
    """
    N = config.N
    params = continuation_params(spec.kappa())
    coeffs = taylor_coefficients(spec, params, N)
    systems = assemble_systems2(coeffs, N)
    if quad is None:
        quad = build_quadrature(spec, params, N, config.M1, config.M2)
    elif quad.N != N:
        raise ValueError(f"quadrature table built for N = {quad.N}, need {N}")
    state = initial_step2(spec, systems, coeffs, quad, N)
    history = [float(np.max(np.abs(state.d_step)))]
    while history[-1] > config.epsilon:
        if len(history) >= config.max_reps:
            raise ConvergenceError(
                f"no convergence after {len(history)} reps "
                f"(last increment {history[-1]:.3e}, epsilon {config.epsilon:.3e})",
                np.asarray(history),
            )
        state = iterate_once2(state, spec, systems, coeffs, quad, N)
        history.append(float(np.max(np.abs(state.d_step))))

    cond_a, cond_b = systems.condition_numbers()
    report = IterationReport(
        Q=len(history),
        cond_alpha=cond_a,
        cond_beta=cond_b,
        history=np.asarray(history),
    )
    return assemble_solution(state.d, coeffs, spec), report
