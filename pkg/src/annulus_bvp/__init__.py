"""Stress and displacement in a partially clamped elastic annulus.

Two parallel complex-series solution routes for the unit annulus whose
outer boundary is clamped along one arc (free elsewhere) and whose inner
boundary carries an arbitrary finite Fourier traction, plus a validation
suite proving their equivalence and boundary-condition fidelity.
"""

from .fields import (
    RigidBody,
    SeriesSolution,
    assemble_solution,
    displacement_at,
    lanczos_filter,
    rigid_body_constant,
    stress_at,
)
from .model import (
    ContinuationParams,
    ProblemSpec,
    SolverConfig,
    TractionSpectrum,
    build_case_preset,
    kappa,
    traction_eval,
)
from .quadrature import QuadratureTable, build_quadrature
from .series import TaylorCoefficients, continuation_params, taylor_coefficients
from .solver1 import ConvergenceError, IterationReport
from .solver1 import run as solve_route1
from .solver2 import run2 as solve_route2

__all__ = [
    "ContinuationParams",
    "ConvergenceError",
    "IterationReport",
    "ProblemSpec",
    "QuadratureTable",
    "RigidBody",
    "SeriesSolution",
    "SolverConfig",
    "TaylorCoefficients",
    "TractionSpectrum",
    "assemble_solution",
    "build_case_preset",
    "build_quadrature",
    "continuation_params",
    "displacement_at",
    "kappa",
    "lanczos_filter",
    "rigid_body_constant",
    "solve_route1",
    "solve_route2",
    "stress_at",
    "taylor_coefficients",
    "traction_eval",
]
