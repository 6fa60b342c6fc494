"""Dense complex polynomial arithmetic and exact linear-factor division.

Polynomials are 1-d complex arrays of ascending-degree coefficients.  The
divisions that extract the d-coefficient families are synthetic (Horner) at
the known pole k_nj; the scalar prefactor in + k(1 - w_j) = (1 - w_j)(k - k_nj)
is applied after dividing, which keeps the root-based division exact.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from .core import Order, k_pole, _check_nj
from .errors import DivisionRemainderError, InputError

REMAINDER_RTOL = 1e-9


def poly_trim(p) -> np.ndarray:
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    nz = np.nonzero(p)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return p[: nz[-1] + 1]


def poly_add(a, b) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return out


def poly_mul(a, b) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    return np.convolve(a, b)


def poly_eval(p, z: complex) -> complex:
    acc = 0j
    for c in np.asarray(p, dtype=complex)[::-1]:
        acc = acc * z + c
    return complex(acc)


def divide_by_linear(p, root: complex):
    """Synthetic division: p(k) = (k - root) q(k) + rem, rem = p(root)."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    if p.size == 1:
        return np.zeros(1, dtype=complex), complex(p[0])
    q = np.zeros(p.size - 1, dtype=complex)
    carry = p[-1]
    for i in range(p.size - 2, -1, -1):
        q[i] = carry
        carry = p[i] + root * carry
    return q, complex(carry)


def binomial_power(shift: complex, power: int) -> np.ndarray:
    """Ascending coefficients of (shift + k)^power with exact integer binomials."""
    if power < 0:
        raise InputError(f"power must be >= 0, got {power}")
    return np.array([comb(power, t) * shift ** (power - t) for t in range(power + 1)], dtype=complex)


def _divide_at_pole(num: np.ndarray, order: Order, n: int, j: int) -> np.ndarray:
    root = k_pole(order, n, j)
    q, rem = divide_by_linear(num, root)
    scale = max(float(np.abs(num).max()), 1e-300)
    if abs(rem) > REMAINDER_RTOL * scale:
        raise DivisionRemainderError(
            f"nonzero remainder {abs(rem):.3e} dividing at pole (n={n}, j={j}); numerator scale {scale:.3e}"
        )
    return q / (1 - order.root(j))


@lru_cache(maxsize=None)
def _d_a_cached(m: int, n: int, alpha: int, j: int) -> tuple:
    order = Order(m)
    two_m = 2 * m
    if alpha == 0:
        return tuple(np.zeros(two_m - 1, dtype=complex))
    knj = k_pole(order, n, j)
    ia = 1j * alpha
    num = binomial_power(ia, two_m)
    num[two_m] -= 1.0
    num[0] -= (ia + knj) ** two_m - knj ** two_m
    # the k^2m terms cancel exactly, so the numerator has degree 2m-1
    num = num[:two_m]
    return tuple(_divide_at_pole(num, order, n, j))


def d_coeffs_a(order: Order, n: int, alpha: int, j: int) -> np.ndarray:
    """The 2m-1 quotient coefficients pairing a V column entry with each k power."""
    _check_nj(order, n, j)
    if alpha < 0:
        raise InputError(f"alpha must be >= 0, got {alpha}")
    return np.array(_d_a_cached(order.m, n, alpha, j))


@lru_cache(maxsize=None)
def _d_b_cached(m: int, n: int, s: int, nu: int, j: int) -> tuple:
    order = Order(m)
    knj = k_pole(order, n, j)
    i_s = 1j * s
    num = binomial_power(i_s, nu)
    num[0] -= (i_s + knj) ** nu
    return tuple(_divide_at_pole(num, order, n, j))


def d_coeffs_b(order: Order, n: int, s: int, nu: int, j: int) -> np.ndarray:
    """The nu quotient coefficients of the convolution family; empty for nu = 0."""
    _check_nj(order, n, j)
    if nu < 0:
        raise InputError(f"nu must be >= 0, got {nu}")
    if nu == 0:
        return np.zeros(0, dtype=complex)
    return np.array(_d_b_cached(order.m, n, s, nu, j))
