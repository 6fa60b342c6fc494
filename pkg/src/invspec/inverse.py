"""Inverse spectral map: spectral data to the V table and back to the potential.

The V table is rebuilt from the diagonal outward: V_nn^(j) = S_nj seeds each
column, and an entry at column n + beta is a weighted sum over the full
column beta.  The potential then falls out of the diagonal relation read as a
definition of p_{gamma alpha}, descending in gamma so the mixed convolution
only touches coefficients that already exist.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEGENERACY_TOL, Order, PotentialCoefficients, SpectralData, VTable, roots_of_unity
from .errors import DegenerateDenominatorError, InputError
from .polyalg import d_coeffs_a, d_coeffs_b


def v_from_s(s: SpectralData, tol: float = DEGENERACY_TOL) -> VTable:
    """Fill the triangular V table from spectral data, columns in ascending order."""
    order = s.order
    jc = order.j_count
    n_max = s.n_max
    w = roots_of_unity(order)
    v = np.zeros((jc, n_max, n_max), dtype=complex)
    for col in range(1, n_max + 1):
        for j in range(1, jc + 1):
            v[j - 1, col - 1, col - 1] = s.table[col - 1, j - 1]
        for n in range(1, col):
            beta = col - n
            for j in range(1, jc + 1):
                snj = s.table[n - 1, j - 1]
                if snj == 0:
                    v[j - 1, n - 1, col - 1] = 0.0
                    continue
                acc = 0j
                for l in range(1, jc + 1):
                    for r in range(1, beta + 1):
                        den = n * w[j] * (1 - w[l]) - r * (1 - w[j])
                        if abs(den) <= tol:
                            raise DegenerateDenominatorError(
                                f"degenerate denominator at (n={n}, j={j}, r={r}, l={l})",
                                indices=(n, j, r, l),
                            )
                        acc += v[l - 1, r - 1, beta - 1] / den
                v[j - 1, n - 1, col - 1] = 1j * (1 - w[j]) * snj * acc
    return VTable(order, n_max, v)


def p_from_v(v: VTable) -> PotentialCoefficients:
    """Read the diagonal relation backwards to recover the potential coefficients."""
    order = v.order
    jc = order.j_count
    n_max = v.n_max
    p = np.zeros((order.gamma_count, n_max), dtype=complex)
    for alpha in range(1, n_max + 1):
        conv = np.zeros(jc, dtype=complex)
        for nu in range(1, order.gamma_count):
            for r in range(1, alpha):
                pv = p[nu, r - 1]
                if pv == 0:
                    continue
                s = alpha - r
                for j in range(1, jc + 1):
                    for n in range(1, s + 1):
                        vns = v.table[j - 1, n - 1, s - 1]
                        if vns == 0:
                            continue
                        conv[:nu] += pv * d_coeffs_b(order, n, s, nu, j) * vns
        for gamma in range(order.gamma_count - 1, -1, -1):
            acc = conv[gamma]
            for j in range(1, jc + 1):
                for n in range(1, alpha + 1):
                    vna = v.table[j - 1, n - 1, alpha - 1]
                    if vna == 0:
                        continue
                    acc += d_coeffs_a(order, n, alpha, j)[gamma] * vna
            p[gamma, alpha - 1] = -acc
    return PotentialCoefficients(order, n_max, p)


def inverse_map(s: SpectralData, tol: float = DEGENERACY_TOL) -> PotentialCoefficients:
    """Spectral data to potential coefficients."""
    return p_from_v(v_from_s(s, tol=tol))


@dataclass(frozen=True)
class MomentReport:
    """Partial sum of n * S~_n with a geometric tail-decay estimate."""

    total: float
    terms: tuple
    tail_decay_exponent: float | None


def first_moment(s: SpectralData) -> MomentReport:
    """Weighted first-moment sum over the spectral rows; finite at any truncation."""
    terms = np.arange(1, s.n_max + 1, dtype=float) * s.s_tilde()
    tail = terms[-max(1, s.n_max // 4):]
    positive = tail[tail > 0]
    exponent = None
    if positive.size >= 2:
        # mean log-decrement over the last quarter of terms
        exponent = float(-np.mean(np.diff(np.log(positive))))
    return MomentReport(float(terms.sum()), tuple(float(t) for t in terms), exponent)


@dataclass(frozen=True)
class ContractionReport:
    """Summability and contraction sums with the contraction verdict."""

    condition_i: float
    condition_ii_p: float
    contraction: bool


def contraction_conditions(s: SpectralData, a_m: float) -> ContractionReport:
    """Evaluate the two solvability sums; contraction holds when the second is < 1."""
    if a_m <= 0:
        raise InputError(f"a_m must be positive, got {a_m}")
    st = s.s_tilde()
    n = np.arange(1, s.n_max + 1, dtype=float)
    cond_i = float((n * st).sum())
    cond_ii = float(4.0 ** (s.order.m - 1) * a_m * (st / (n + 1)).sum())
    return ContractionReport(cond_i, cond_ii, cond_ii < 1.0)
