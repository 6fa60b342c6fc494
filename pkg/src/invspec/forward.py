"""Forward spectral map: potential coefficients to the V table and spectral data.

For each column alpha the off-diagonal entries are filled first from earlier
columns of the same row, then one joint (2m-1)-dimensional solve produces the
diagonal entries V_aa^(j); these diagonals are the spectral data.  The column
sweep is lower triangular, so entries with alpha <= N never depend on deeper
potential modes.
"""
from __future__ import annotations

import numpy as np

from . import linalg
from .core import DEGENERACY_TOL, Order, PotentialCoefficients, SpectralData, VTable
from .errors import InputError, ResonantIndexError, SingularSystemError
from .polyalg import d_coeffs_a, d_coeffs_b

LEFT_FACTOR_RTOL = 1e-12
COND_LIMIT = 1e12


def left_factor(order: Order, n: int, alpha: int, j: int) -> complex:
    """(alpha - c)^2m - c^2m with c = n / (1 - omega_j); nonzero for alpha > n."""
    c = n / (1 - order.root(j))
    return (alpha - c) ** (2 * order.m) - c ** (2 * order.m)


def _offdiag_value(order: Order, pc: np.ndarray, v: np.ndarray, n: int, alpha: int, j: int,
                   left_tol: float) -> complex:
    m = order.m
    c = n / (1 - order.root(j))
    left = (alpha - c) ** (2 * m) - c ** (2 * m)
    # relative scale keeps the resonance guard meaningful at large alpha
    if abs(left) <= left_tol * (alpha / abs(1 - order.root(j))) ** (2 * m):
        raise ResonantIndexError(
            f"resonant left factor at (n={n}, alpha={alpha}, j={j})", indices=(n, alpha, j)
        )
    gammas = np.arange(order.gamma_count)
    acc = 0j
    for s in range(n, alpha):
        vns = v[j - 1, n - 1, s - 1]
        if np.isnan(vns):
            raise InputError(f"missing prerequisite entry V(n={n}, s={s}, j={j})")
        if vns == 0:
            continue
        weights = (1j * (s - c)) ** gammas
        acc += np.dot(weights, pc[:, alpha - s - 1]) * vns
    return (-1) ** (m + 1) * acc / left


def offdiag_step(p: PotentialCoefficients, v: VTable, n: int, alpha: int, j: int,
                 left_tol: float = LEFT_FACTOR_RTOL) -> complex:
    """One off-diagonal recurrence step; requires V(n, s) present for n <= s < alpha."""
    if not 1 <= n < alpha <= v.n_max:
        raise InputError(f"off-diagonal step needs 1 <= n < alpha <= {v.n_max}, got n={n}, alpha={alpha}")
    return _offdiag_value(p.order, p.coeffs, v.table, n, alpha, j, left_tol)


def _convolution_terms(order: Order, pc: np.ndarray, v: np.ndarray, alpha: int) -> np.ndarray:
    """Vector over gamma of the mixed p*V convolution entering the diagonal relation."""
    jc = order.j_count
    out = np.zeros(jc, dtype=complex)
    for nu in range(1, order.gamma_count):
        for r in range(1, alpha):
            pv = pc[nu, r - 1]
            if pv == 0:
                continue
            s = alpha - r
            for j in range(1, jc + 1):
                for n in range(1, s + 1):
                    vns = v[j - 1, n - 1, s - 1]
                    if vns == 0 or np.isnan(vns):
                        continue
                    out[:nu] += pv * d_coeffs_b(order, n, s, nu, j) * vns
    return out


def _diag_values(order: Order, pc: np.ndarray, v: np.ndarray, alpha: int,
                 cond_limit: float) -> np.ndarray:
    jc = order.j_count
    a_mat = np.zeros((jc, jc), dtype=complex)
    for j in range(1, jc + 1):
        a_mat[:, j - 1] = d_coeffs_a(order, alpha, alpha, j)
    rhs = -(pc[:, alpha - 1].astype(complex)) - _convolution_terms(order, pc, v, alpha)
    for j in range(1, jc + 1):
        for n in range(1, alpha):
            vna = v[j - 1, n - 1, alpha - 1]
            if vna == 0:
                continue
            rhs -= d_coeffs_a(order, n, alpha, j) * vna
    if linalg.pivot_ratio(a_mat) > cond_limit:
        raise SingularSystemError(f"diagonal system at alpha={alpha} is numerically singular", alpha=alpha)
    return linalg.lu_solve(a_mat, rhs)


def diag_solve(p: PotentialCoefficients, v: VTable, alpha: int,
               cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Solve the coupled diagonal relation at column alpha for the 2m-1 values V_aa^(j)."""
    if not 1 <= alpha <= v.n_max:
        raise InputError(f"alpha={alpha} outside 1..{v.n_max}")
    return _diag_values(p.order, p.coeffs, v.table, alpha, cond_limit)


def forward_map(p: PotentialCoefficients, left_tol: float = LEFT_FACTOR_RTOL,
                cond_limit: float = COND_LIMIT) -> tuple[VTable, SpectralData]:
    """Build the full V table from the potential and read off the spectral data."""
    order = p.order
    jc = order.j_count
    n_max = p.n_max
    v = np.full((jc, n_max, n_max), np.nan, dtype=complex)
    for alpha in range(1, n_max + 1):
        for n in range(1, alpha):
            for j in range(1, jc + 1):
                v[j - 1, n - 1, alpha - 1] = _offdiag_value(order, p.coeffs, v, n, alpha, j, left_tol)
        v[:, alpha - 1, alpha - 1] = _diag_values(order, p.coeffs, v, alpha, cond_limit)
    lower = np.tril_indices(n_max, -1)
    v[:, lower[0], lower[1]] = 0.0
    vt = VTable(order, n_max, v)
    return vt, vt.diagonal()


def series_q(p: PotentialCoefficients) -> np.ndarray:
    """Half-line coefficient table carried by the V recurrences: (-i)^gamma p_{gamma n}.

    This is the table for which the recurrence-built series solves the
    half-line equation; it differs from q_from_p by the factor (-1)^m.
    """
    g = np.arange(p.order.gamma_count)
    return (-1j) ** g[:, None] * p.coeffs


def q_from_p(p: PotentialCoefficients) -> np.ndarray:
    """Classical half-line rescaling q_{gamma n} = (-1)^m (-i)^gamma p_{gamma n}."""
    return (-1) ** p.order.m * series_q(p)
