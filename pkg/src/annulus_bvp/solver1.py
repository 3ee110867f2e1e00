"""First solution route: successive approximation with resultant constraints.

The unknowns are the 2N+1 complex series coefficients d_k (|k| <= N) of the
general solution. Two fixed triangular Toeplitz systems are solved once per
sweep:

  * the "alpha" system, upper triangular with diagonal alpha_0, over
    (d_{-1}, ..., d_{-N}); its rows assemble the inner-expansion values
    A_{-k} for k = 1..N;
  * the "beta" system, upper triangular with diagonal beta_1 = 1, over
    (d_0, ..., d_N); its rows assemble the outer-expansion values B_k for
    k = -1..N-1.

The first sweep carries the traction data; every later sweep feeds back the
conjugate-coupled terms of the previous increment, scaled by powers of r,
so the increments decay geometrically and the accumulated sum converges.
The k = 1 (alpha) and k = -1 (beta) rows pin A_{-1} and B_{-1} to their
closed forms

    A_{-1} = (p_{-1} + i q_{-1}) r / (1 + kappa)
    B_{-1} = -kappa (p_{-1} + i q_{-1}) r / (1 + kappa)

which encode the resultant balance and single-valuedness of displacement
(kappa A_{-1} + B_{-1} = 0).

Sign note: the traction terms of the beta-side right-hand sides enter with
a minus sign (B_k = r^{2k+2} A_k + (k+1)(1-r^{-2}) r^2 conj(A_{-k})
- r^{k+2} (p_k + i q_k)); that is the sign the inner boundary condition
forces, verified against a direct dense solve of the full constraint set
in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import SeriesSolution, assemble_solution
from .linalg import condition_number_2norm, solve_upper_toeplitz, toeplitz_upper
from .model import ProblemSpec, SolverConfig
from .series import TaylorCoefficients, continuation_params, taylor_coefficients


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the stopping tolerance within the rep cap."""

    def __init__(self, message: str, history: np.ndarray):
        super().__init__(message)
        self.history = history


@dataclass
class IterationReport:
    """Run metadata: rep count, system condition numbers, increment history."""

    Q: int
    cond_alpha: float
    cond_beta: float
    history: np.ndarray = field(default_factory=lambda: np.empty(0))
    converged: bool = True


@dataclass
class LinearSystems:
    """The two fixed triangular Toeplitz systems of one solution route.

    ``alpha_band``/``beta_band`` are the first rows of the upper-triangular
    matrices; dense copies are kept for condition-number reporting.
    """

    alpha_band: np.ndarray
    beta_band: np.ndarray
    alpha_dense: np.ndarray
    beta_dense: np.ndarray

    def condition_numbers(self) -> tuple[float, float]:
        return (
            condition_number_2norm(self.alpha_dense),
            condition_number_2norm(self.beta_dense),
        )


def assemble_systems(coeffs: TaylorCoefficients, N: int) -> LinearSystems:
    """Route-1 systems: N x N in alpha over d_{-1}..d_{-N}, and
    (N+1) x (N+1) in beta over d_0..d_N."""
    alpha_band = coeffs.alpha[:N]
    beta_band = coeffs.beta[1 : N + 2]
    return LinearSystems(
        alpha_band=alpha_band,
        beta_band=beta_band,
        alpha_dense=toeplitz_upper(alpha_band, N),
        beta_dense=toeplitz_upper(beta_band, N + 1),
    )


def harmonic_array(spec: ProblemSpec, N: int) -> np.ndarray:
    """Traction amplitudes f_k = p_k + i q_k as an array indexed k + N.

    Harmonics beyond the truncation order are unrepresentable and rejected.
    """
    if spec.traction.max_order() > N:
        raise ValueError(
            f"traction harmonic |k| = {spec.traction.max_order()} exceeds N = {N}"
        )
    f = np.zeros(2 * N + 1, dtype=complex)
    for k, c in spec.traction.coefficients.items():
        f[k + N] = c
    return f


@dataclass
class IterationState:
    """Accumulated coefficients plus the last increment and its expansions.

    ``d`` accumulates the increments d^{(q)}; ``d_step`` is the latest
    increment; ``A_step``/``B_step`` are the expansion values of the latest
    increment (index k + N for k in [-N, N]), which the next sweep's
    right-hand sides consume.
    """

    d: np.ndarray
    d_step: np.ndarray
    A_step: np.ndarray
    B_step: np.ndarray
    q: int = 0


def expansion_values(
    d: np.ndarray, coeffs: TaylorCoefficients, N: int
) -> tuple[np.ndarray, np.ndarray]:
    """A_k = sum_l alpha_l d_{k-l} and B_k = sum_l beta_l d_{k+l} for |k| <= N,
    truncated to the available d range; arrays indexed k + N."""
    A = np.convolve(coeffs.alpha, d)[: 2 * N + 1]
    B = np.convolve(coeffs.beta, d[::-1])[: 2 * N + 1][::-1]
    return A, B


def _beta_lag_rhs(
    A_prev: np.ndarray, B_prev: np.ndarray, spec: ProblemSpec, N: int
) -> np.ndarray:
    """Feedback part of the beta-side right-hand sides (rows k = 0..N-1)."""
    r = spec.r
    one_m = 1.0 - r**-2
    rhs = np.zeros(N + 1, dtype=complex)
    # row order: B_{-1}, B_0, B_1, B_2, ..., B_{N-1}
    rhs[1] = r**2 * A_prev[N] + one_m * r**2 * np.conj(A_prev[N])
    rhs[2] = r**4 * A_prev[N + 1]
    ks = np.arange(2, N)
    rhs[3:] = (
        r ** (2 * ks + 2) * A_prev[N + ks]
        + (ks**2 - 1) * one_m**2 * r ** (2 * ks + 2) * A_prev[N + ks]
        + (ks + 1) * one_m * r ** (2 * ks) * np.conj(B_prev[N - ks])
    )
    return rhs


def _alpha_lag_rhs(
    A_prev: np.ndarray, B_prev: np.ndarray, spec: ProblemSpec, N: int
) -> np.ndarray:
    """Feedback part of the alpha-side right-hand sides (rows k = 2..N)."""
    r = spec.r
    one_m = 1.0 - r**-2
    rhs = np.zeros(N, dtype=complex)
    ks = np.arange(2, N + 1)
    rhs[1:] = (ks - 1) * one_m * r ** (2 * ks) * np.conj(
        A_prev[N + ks]
    ) + r ** (2 * ks - 2) * B_prev[N - ks]
    return rhs


def _traction_rhs(
    spec: ProblemSpec, f: np.ndarray, N: int
) -> tuple[np.ndarray, np.ndarray]:
    """Inhomogeneous (traction) right-hand sides of the first sweep."""
    r = spec.r
    kap = spec.kappa()
    one_m = 1.0 - r**-2
    resultant = f[N - 1]  # p_{-1} + i q_{-1}

    rhs_a = np.zeros(N, dtype=complex)
    rhs_a[0] = resultant * r / (1.0 + kap)
    ks = np.arange(2, N + 1)
    rhs_a[1:] = r**ks * f[N - ks]

    rhs_b = np.zeros(N + 1, dtype=complex)
    rhs_b[0] = -kap * resultant * r / (1.0 + kap)
    rhs_b[1] = -(r**2) * f[N]
    rhs_b[2] = 2.0 * one_m * r**3 * np.conj(resultant) / (1.0 + kap) - r**3 * f[N + 1]
    ks = np.arange(2, N)
    rhs_b[3:] = (ks + 1) * one_m * r ** (ks + 2) * np.conj(f[N - ks]) - r ** (
        ks + 2
    ) * f[N + ks]
    return rhs_a, rhs_b


def _solve_sweep(
    systems: LinearSystems, rhs_a: np.ndarray, rhs_b: np.ndarray, N: int
) -> np.ndarray:
    """Solve both triangular systems and scatter into a d-increment array."""
    x = solve_upper_toeplitz(systems.alpha_band, rhs_a)  # d_{-1}..d_{-N}
    y = solve_upper_toeplitz(systems.beta_band, rhs_b)  # d_0..d_N
    step = np.empty(2 * N + 1, dtype=complex)
    step[:N] = x[::-1]
    step[N:] = y
    return step


def initial_step(
    spec: ProblemSpec, systems: LinearSystems, coeffs: TaylorCoefficients, N: int
) -> IterationState:
    """First sweep: solve both systems with the traction right-hand sides."""
    f = harmonic_array(spec, N)
    rhs_a, rhs_b = _traction_rhs(spec, f, N)
    step = _solve_sweep(systems, rhs_a, rhs_b, N)
    A_step, B_step = expansion_values(step, coeffs, N)
    return IterationState(d=step.copy(), d_step=step, A_step=A_step, B_step=B_step)


def iterate_once(
    state: IterationState,
    spec: ProblemSpec,
    systems: LinearSystems,
    coeffs: TaylorCoefficients,
    N: int,
) -> IterationState:
    """One feedback sweep: right-hand sides from the previous increment."""
    rhs_a = _alpha_lag_rhs(state.A_step, state.B_step, spec, N)
    rhs_b = _beta_lag_rhs(state.A_step, state.B_step, spec, N)
    step = _solve_sweep(systems, rhs_a, rhs_b, N)
    A_step, B_step = expansion_values(step, coeffs, N)
    return IterationState(
        d=state.d + step, d_step=step, A_step=A_step, B_step=B_step, q=state.q + 1
    )


def run(
    spec: ProblemSpec, config: SolverConfig
) -> tuple[SeriesSolution, IterationReport]:
    """Iterate route 1 to the stopping tolerance and assemble the solution.

    Raises ConvergenceError (carrying the increment history) if the cap
    ``config.max_reps`` is reached first.
    """
    N = config.N
    params = continuation_params(spec.kappa())
    coeffs = taylor_coefficients(spec, params, N)
    systems = assemble_systems(coeffs, N)

    state = initial_step(spec, systems, coeffs, N)
    history = [float(np.max(np.abs(state.d_step)))]
    while history[-1] > config.epsilon:
        if len(history) >= config.max_reps:
            raise ConvergenceError(
                f"no convergence after {len(history)} reps "
                f"(last increment {history[-1]:.3e}, epsilon {config.epsilon:.3e})",
                np.asarray(history),
            )
        state = iterate_once(state, spec, systems, coeffs, N)
        history.append(float(np.max(np.abs(state.d_step))))

    cond_a, cond_b = systems.condition_numbers()
    report = IterationReport(
        Q=len(history),
        cond_alpha=cond_a,
        cond_beta=cond_b,
        history=np.asarray(history),
    )
    return assemble_solution(state.d, coeffs, spec), report
