"""Linear solvers for the positive (semi)definite systems used throughout.

Three paths share one contract (residual infinity-norm <= tol, reported in
a diagnostics record): exact rational Gaussian elimination for small
systems, dense float solve with one step of iterative refinement, and
Jacobi-preconditioned conjugate gradients for everything larger. Geometric
conductances give these systems an extreme dynamic range, so the exact
path is the default whenever the system is small enough for it; it makes
downstream pointwise identities hold to rounding error instead of to
solver error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EXACT_SIZE_LIMIT = 128
DENSE_SIZE_LIMIT = 500


class SolverError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class SolveDiagnostics:
    """Machine-readable record of one linear solve."""

    method: str
    iterations: int
    residual: float
    tolerance: float

    def to_dict(self):
        return {
            "method": self.method,
            "iterations": self.iterations,
            "residual": self.residual,
            "tolerance": self.tolerance,
        }


def solve_exact(matrix_rows, rhs):
    """Gaussian elimination over Fractions; returns list of Fractions.

    matrix_rows: list of lists (any exact-convertible entries).
    Partial pivoting keeps the elimination defined for any nonsingular
    system; entries are converted through Fraction, so float inputs are
    used at their exact binary values.
    """
    n = len(rhs)
    a = [[Fraction(v) for v in row] + [Fraction(b)]
         for row, b in zip(matrix_rows, rhs)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0:
            raise SolverError("exact elimination hit a zero pivot (singular system)")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            if factor == 0:
                continue
            for c in range(col, n + 1):
                a[r][c] -= factor * a[col][c]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n]
        for c in range(r + 1, n):
            acc -= a[r][c] * x[c]
        x[r] = acc / a[r][r]
    return x


def _residual_inf(matrix, x, rhs):
    return float(np.max(np.abs(matrix @ x - rhs))) if len(rhs) else 0.0


def solve_spd_dense(matrix, rhs, tol):
    """Dense solve plus one iterative-refinement pass."""
    x = np.linalg.solve(matrix, rhs)
    r = rhs - matrix @ x
    x = x + np.linalg.solve(matrix, r)
    res = _residual_inf(matrix, x, rhs)
    return x, SolveDiagnostics("dense", 1, res, tol)


def solve_spd_pcg(matrix, rhs, tol, max_iter=None):
    """Jacobi-preconditioned conjugate gradients on a dense/sparse operator."""
    n = len(rhs)
    if max_iter is None:
        max_iter = max(200, 40 * n)
    diag = np.asarray(matrix.diagonal() if hasattr(matrix, "diagonal") else np.diag(matrix))
    inv_diag = 1.0 / diag
    x = np.zeros(n)
    r = rhs - matrix @ x
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    it = 0
    while it < max_iter:
        if float(np.max(np.abs(r))) <= tol:
            break
        ap = matrix @ p
        denom = float(p @ ap)
        if denom <= 0:
            raise SolverError("conjugate gradient lost positive definiteness",
                              SolveDiagnostics("pcg", it, float(np.max(np.abs(r))), tol))
        alpha = rz / denom
        x += alpha * p
        r -= alpha * ap
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    res = _residual_inf(matrix, x, rhs)
    if res > tol:
        raise SolverError(
            f"pcg did not reach residual {tol:g} in {it} iterations (got {res:g})",
            SolveDiagnostics("pcg", it, res, tol))
    return x, SolveDiagnostics("pcg", it, res, tol)


def solve_psd_system(matrix_exact_rows, rhs_exact, tol=1e-10, prefer_exact=True):
    """Solve a symmetric positive definite system, exactly when small.

    matrix_exact_rows holds exact-convertible entries (floats are fine,
    they are taken at face value). Returns (x_float, x_exact_or_None,
    diagnostics); the exact path reports residual 0.0 by construction.
    """
    n = len(rhs_exact)
    if prefer_exact and n <= EXACT_SIZE_LIMIT:
        x_exact = solve_exact(matrix_exact_rows, rhs_exact)
        x = np.array([float(v) for v in x_exact])
        return x, x_exact, SolveDiagnostics("exact", 0, 0.0, tol)
    matrix = np.array([[float(v) for v in row] for row in matrix_exact_rows])
    rhs = np.array([float(v) for v in rhs_exact])
    if n <= DENSE_SIZE_LIMIT:
        x, diag = solve_spd_dense(matrix, rhs, tol)
        if diag.residual > tol:
            raise SolverError(
                f"dense solve residual {diag.residual:g} exceeds {tol:g}", diag)
        return x, None, diag
    x, diag = solve_spd_pcg(matrix, rhs, tol)
    return x, None, diag
