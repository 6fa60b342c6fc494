"""Dense complex LU with partial pivoting: determinant and linear solve.

Row operations are vectorized but the elimination order is fixed, so results
are bit-reproducible across runs; no BLAS-backed factorization is used.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError, SingularMatrixError


def lu_factor(a: np.ndarray):
    """Return (lu, piv, sign): packed L\\U factors, row permutation, swap sign."""
    lu = np.array(a, dtype=complex)
    if lu.ndim != 2 or lu.shape[0] != lu.shape[1]:
        raise InputError(f"square matrix required, got shape {lu.shape}")
    n = lu.shape[0]
    piv = np.arange(n)
    sign = 1.0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            sign = -sign
        pivot = lu[k, k]
        if pivot == 0:
            continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv, sign


def lu_det(a: np.ndarray) -> complex:
    """Determinant via LU; an exactly singular matrix yields 0."""
    lu, _, sign = lu_factor(a)
    return complex(sign * np.prod(np.diag(lu)))


def solve_factored(lu: np.ndarray, piv: np.ndarray, b: np.ndarray, tol: float = 0.0) -> np.ndarray:
    n = lu.shape[0]
    scale = max(np.abs(np.diag(lu)).max(), 1.0)
    x = np.array(b, dtype=complex)[piv]
    for i in range(n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        pivot = lu[i, i]
        if abs(pivot) <= tol * scale or pivot == 0:
            raise SingularMatrixError(f"negligible pivot at index {i}", pivot_index=i)
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / pivot
    return x


def lu_solve(a: np.ndarray, b: np.ndarray, tol: float = 1e-300) -> np.ndarray:
    """Solve a x = b; raises SingularMatrixError on a negligible pivot."""
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != np.asarray(a).shape[0]:
        raise InputError(f"rhs length {b.shape[0]} does not match matrix side {np.asarray(a).shape[0]}")
    lu, piv, _ = lu_factor(a)
    return solve_factored(lu, piv, b, tol=tol)


def pivot_ratio(a: np.ndarray) -> float:
    """Crude condition estimate: max |U_ii| / min |U_ii| from the LU factors."""
    lu, _, _ = lu_factor(a)
    d = np.abs(np.diag(lu))
    lo = d.min()
    if lo == 0:
        return np.inf
    return float(d.max() / lo)
