"""Dense complex solves and condition numbers for the truncated systems.

The truncated systems are small (at most (N+1) x (N+1), N ~ 60) and
triangular Toeplitz, so there are two solve paths: LAPACK's partial-pivot
LU behind ``numpy.linalg.solve`` for the general case, and direct forward
substitution exploiting the Toeplitz band for the hot loop. Condition
numbers are reported in the 2-norm (via SVD) for comparability across
solver variants.
"""

from __future__ import annotations

import math

import numpy as np


class SingularMatrixError(ValueError):
    """Raised when a linear system is singular to working precision."""


def solve_dense(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b by partial-pivot LU with a residual guard.

    Raises SingularMatrixError if LAPACK reports a zero pivot or the
    back-substituted residual shows the system was effectively singular.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError("solution overflowed; matrix numerically singular")
    scale = np.linalg.norm(A, np.inf) * np.linalg.norm(x, np.inf) + np.linalg.norm(
        b, np.inf
    )
    residual = np.linalg.norm(A @ x - b, np.inf)
    if scale > 0 and not residual <= 1e-8 * scale:
        raise SingularMatrixError(
            f"residual {residual:.3e} exceeds 1e-8 * scale {scale:.3e}"
        )
    return x


def condition_number_2norm(A: np.ndarray) -> float:
    """sigma_max / sigma_min of a square matrix; +inf if singular."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    sigma = np.linalg.svd(A, compute_uv=False)
    if sigma[-1] == 0.0:
        return math.inf
    return float(sigma[0] / sigma[-1])


def solve_triangular_toeplitz(band: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the lower-triangular Toeplitz system T x = rhs.

    ``band`` holds the first column c_0..c_{n-1}, i.e. T[i, j] = c_{i-j}
    for i >= j. Forward substitution, O(n^2).
    """
    c = np.asarray(band, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    n = b.shape[0]
    if c.shape[0] < n:
        raise ValueError(f"band of length {c.shape[0]} too short for rhs of {n}")
    if c[0] == 0.0:
        raise SingularMatrixError("zero leading Toeplitz coefficient")
    x = np.empty(n, dtype=complex)
    for i in range(n):
        acc = np.dot(c[i:0:-1], x[:i]) if i else 0.0
        x[i] = (b[i] - acc) / c[0]
    return x


def toeplitz_upper(band: np.ndarray, n: int) -> np.ndarray:
    """Dense n x n upper-triangular Toeplitz matrix with first row ``band[:n]``."""
    c = np.asarray(band, dtype=complex)
    if c.shape[0] < n:
        raise ValueError(f"band of length {c.shape[0]} too short for size {n}")
    offsets = np.arange(n)[None, :] - np.arange(n)[:, None]
    return np.where(offsets >= 0, c[np.clip(offsets, 0, n - 1)], 0.0)


def solve_upper_toeplitz(band: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve U x = rhs for U upper-triangular Toeplitz with first row ``band``.

    Reversal maps the system onto a lower-triangular Toeplitz one.
    """
    return solve_triangular_toeplitz(band, rhs[::-1])[::-1]
