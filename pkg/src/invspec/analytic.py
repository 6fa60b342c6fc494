"""Closed-form evaluation of the analytic objects built from the data tables.

Everything here is a finite exponential sum.  Tail integrals over [t, inf)
are done symbolically, int_t^inf c e^(a s) ds = -c e^(a t) / a with
Re a < 0, so no quadrature error enters any of the checks.  Normalization
conventions:

* ``eval_f`` is the half-line series whose coefficients are V_na / (i n + k (1 - w_j)).
* ``eval_phi`` is the same solution in the periodic variable; its terms carry
  V_na / (i [n + lam w_tau (1 - w_j)]), which makes eval_phi(x = i t, lam = -i k)
  equal to eval_f(t, k) identically.
* The half-line equation solved by the series carries the coefficient table
  ``forward.series_q`` (equal to (-1)^m times the classical rescaling).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Order, PotentialCoefficients, SpectralData, VTable, roots_of_unity
from .errors import InputError, PoleProximityError, TruncationError
from .forward import series_q

POLE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ExpSum:
    """Finite exponential sum t -> sum_i coeffs[i] * exp(rates[i] * t)."""

    coeffs: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        r = np.atleast_1d(np.asarray(self.rates, dtype=complex))
        if c.shape != r.shape or c.ndim != 1:
            raise InputError("coeffs and rates must be 1-d arrays of equal length")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "rates", r)

    @classmethod
    def zero(cls) -> "ExpSum":
        return cls(np.zeros(0), np.zeros(0))

    def __call__(self, t: complex) -> complex:
        return complex(np.sum(self.coeffs * np.exp(self.rates * t)))

    def derivative(self, n: int = 1) -> "ExpSum":
        return ExpSum(self.coeffs * self.rates ** n, self.rates)

    def scale(self, c: complex) -> "ExpSum":
        return ExpSum(c * self.coeffs, self.rates)

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(np.concatenate([self.coeffs, other.coeffs]),
                      np.concatenate([self.rates, other.rates]))

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(np.outer(self.coeffs, other.coeffs).ravel(),
                      np.add.outer(self.rates, other.rates).ravel())

    def integral_tail(self) -> "ExpSum":
        """t -> int_t^inf of the sum; every rate must have negative real part."""
        if np.any(self.rates.real >= 0):
            raise InputError("tail integral requires Re(rate) < 0 for every term")
        return ExpSum(-self.coeffs / self.rates, self.rates)

    def collected(self, tol: float = 1e-12) -> "ExpSum":
        """Merge terms with coinciding rates."""
        if self.coeffs.size == 0:
            return self
        order_idx = np.lexsort((self.rates.imag, self.rates.real))
        r = self.rates[order_idx]
        c = self.coeffs[order_idx]
        out_r, out_c = [r[0]], [c[0]]
        for ri, ci in zip(r[1:], c[1:]):
            if abs(ri - out_r[-1]) <= tol:
                out_c[-1] += ci
            else:
                out_r.append(ri)
                out_c.append(ci)
        return ExpSum(np.array(out_c), np.array(out_r))

    def mode_coefficients(self, tol: float = 1e-9) -> dict[int, complex]:
        """Coefficients keyed by integer decay mode for sums with rates -n."""
        merged = self.collected()
        modes: dict[int, complex] = {}
        for c, r in zip(merged.coeffs, merged.rates):
            n = round(-r.real)
            if abs(r - (-n)) > tol:
                raise InputError(f"rate {r} is not an integer decay mode")
            modes[n] = modes.get(n, 0j) + complex(c)
        return modes


def _pole_distance_check(order: Order, v_depth: int, den, n: int, j: int, tol: float) -> None:
    if abs(den) <= tol:
        raise PoleProximityError(
            f"evaluation point within {tol} of the (n={n}, j={j}) pole", indices=(n, j)
        )


def eval_f(v: VTable, t: complex, k: complex, deriv: int = 0, depth: int | None = None,
           pole_tol: float = POLE_TOL) -> complex:
    """Half-line solution series (or its t-derivative) at (t, k), truncated at depth."""
    order = v.order
    n_cap = v.n_max if depth is None else depth
    if n_cap > v.n_max:
        raise TruncationError(f"depth {n_cap} exceeds stored table depth {v.n_max}",
                              needed_depth=n_cap)
    w = roots_of_unity(order)
    rate0 = 1j * k
    val = rate0 ** deriv * np.exp(rate0 * t)
    for j in range(1, order.j_count + 1):
        for alpha in range(1, n_cap + 1):
            rate = 1j * k - alpha
            factor = rate ** deriv * np.exp(rate * t)
            for n in range(1, alpha + 1):
                coeff = v.table[j - 1, n - 1, alpha - 1]
                den = 1j * n + k * (1 - w[j])
                _pole_distance_check(order, n_cap, den, n, j, pole_tol)
                if coeff == 0:
                    continue
                val += coeff / den * factor
    return complex(val)


def eval_phi(v: VTable, x: complex, lam: complex, tau: int = 0, deriv: int = 0,
             depth: int | None = None, pole_tol: float = POLE_TOL) -> complex:
    """Periodic-variable solution series on branch lam * w_tau (or its x-derivative)."""
    order = v.order
    if not 0 <= tau <= 2 * order.m - 1:
        raise InputError(f"branch index tau={tau} outside 0..{2 * order.m - 1}")
    n_cap = v.n_max if depth is None else depth
    if n_cap > v.n_max:
        raise TruncationError(f"depth {n_cap} exceeds stored table depth {v.n_max}",
                              needed_depth=n_cap)
    w = roots_of_unity(order)
    lw = lam * order.root(tau)
    rate0 = 1j * lw
    val = rate0 ** deriv * np.exp(rate0 * x)
    for j in range(1, order.j_count + 1):
        for alpha in range(1, n_cap + 1):
            rate = 1j * (lw + alpha)
            factor = rate ** deriv * np.exp(rate * x)
            for n in range(1, alpha + 1):
                coeff = v.table[j - 1, n - 1, alpha - 1]
                den = n + lw * (1 - w[j])
                _pole_distance_check(order, n_cap, den, n, j, pole_tol)
                if coeff == 0:
                    continue
                val += coeff / (1j * den) * factor
    return complex(val)


def ode_residual(p: PotentialCoefficients, v: VTable, t: complex, k: complex,
                 depth: int | None = None, pole_tol: float = POLE_TOL) -> complex:
    """Residual of the half-line equation on the truncated series.

    Uses the coefficient table the recurrences encode (forward.series_q), so a
    correct (p, V) pair drives the residual to zero as the depth grows.
    """
    order = p.order
    m = order.m
    n_cap = min(v.n_max, p.n_max) if depth is None else depth
    q = series_q(p)
    res = (-1) ** m * eval_f(v, t, k, deriv=2 * m, depth=n_cap, pole_tol=pole_tol)
    res -= k ** (2 * m) * eval_f(v, t, k, deriv=0, depth=n_cap, pole_tol=pole_tol)
    for gamma in range(order.gamma_count):
        q_gamma = sum(q[gamma, n - 1] * np.exp(-n * t) for n in range(1, p.n_max + 1))
        if q_gamma != 0:
            res += q_gamma * eval_f(v, t, k, deriv=gamma, depth=n_cap, pole_tol=pole_tol)
    return complex(res)


def _kernel_terms(v: VTable, depth: int | None = None):
    """Arrays (coeff, t_rate, u_rate, alpha) of the kernel's exponential terms."""
    order = v.order
    n_cap = v.n_max if depth is None else depth
    w = roots_of_unity(order)
    coeffs, t_rates, u_rates, cols = [], [], [], []
    for j in range(1, order.j_count + 1):
        for alpha in range(1, n_cap + 1):
            for n in range(1, alpha + 1):
                coeff = v.table[j - 1, n - 1, alpha - 1]
                if coeff == 0:
                    continue
                c = n / (1 - w[j])
                coeffs.append(coeff / (1j * (1 - w[j])))
                t_rates.append(-alpha + c)
                u_rates.append(-c)
                cols.append(alpha)
    return (np.array(coeffs, dtype=complex), np.array(t_rates, dtype=complex),
            np.array(u_rates, dtype=complex), np.array(cols, dtype=int))


def _transition_terms(s: SpectralData):
    """Arrays (coeff, t_rate, u_rate, n) of the transition function's terms."""
    order = s.order
    w = roots_of_unity(order)
    coeffs, t_rates, u_rates, rows = [], [], [], []
    for j in range(1, order.j_count + 1):
        for n in range(1, s.n_max + 1):
            coeff = s.table[n - 1, j - 1]
            if coeff == 0:
                continue
            c = n / (1 - w[j])
            coeffs.append(coeff / (1j * (1 - w[j])))
            t_rates.append(c * w[j])
            u_rates.append(-c)
            rows.append(n)
    return (np.array(coeffs, dtype=complex), np.array(t_rates, dtype=complex),
            np.array(u_rates, dtype=complex), np.array(rows, dtype=int))


def kernel_K(v: VTable, t: float, u: float, dt: int = 0, du: int = 0) -> complex:
    """Transformation kernel K(t, u) for u >= t >= 0, with analytic partials."""
    if u < t:
        raise InputError(f"kernel requires u >= t, got t={t}, u={u}")
    kc, ka, kb, _ = _kernel_terms(v)
    if kc.size == 0:
        return 0j
    return complex(np.sum(kc * ka ** dt * kb ** du * np.exp(ka * t + kb * u)))


def kernel_diag(v: VTable) -> ExpSum:
    """K(x, x) as an exponential sum in x (rates are the negative column indices)."""
    kc, ka, kb, _ = _kernel_terms(v)
    return ExpSum(kc, ka + kb).collected()


def q0_from_kernel(v: VTable) -> ExpSum:
    """2m * d/dx K(x, x); its integer modes feed the trace cross-check."""
    return kernel_diag(v).derivative().scale(2 * v.order.m)


def transform_lhs(v: VTable, t: float, k: complex) -> complex:
    """e^{i k t} + int_t^inf K(t, u) e^{i k u} du, integral in closed form.

    Converges for Im k > -1/2 where every u-rate keeps a negative real part;
    this is an independent route to the same value as eval_f.
    """
    kc, ka, kb, _ = _kernel_terms(v)
    val = np.exp(1j * k * t)
    if kc.size == 0:
        return complex(val)
    rates = kb + 1j * k
    if np.any(rates.real >= 0):
        raise InputError(f"transform integral diverges at Im k = {k.imag}; need Im k > -1/2")
    val += np.sum(kc * np.exp(ka * t) * (-np.exp(rates * t) / rates))
    return complex(val)


def transition(s: SpectralData, t: float, u: float) -> complex:
    """Transition function of the data, evaluated through its (t, u) term structure."""
    fc, fg, fh, _ = _transition_terms(s)
    if fc.size == 0:
        return 0j
    return complex(np.sum(fc * np.exp(fg * t + fh * u)))


def transition_m1(s: SpectralData, combined: float) -> complex:
    """One-argument form of the transition function; collapses only at m = 1."""
    if s.order.m != 1:
        raise InputError("the single-argument transition form exists only for m = 1")
    return transition(s, combined, 0.0)


def marchenko_residual(v: VTable, s: SpectralData, t: float, u: float,
                       projected: bool = True) -> complex:
    """Residual K(t,u) - F(t,u) - int_t^inf K(t,s') F(s',u) ds' in closed form.

    With ``projected`` the product integral keeps only the exponential modes
    the truncated tables resolve (combined column index <= N); on a consistent
    table pair that projection vanishes identically.  The raw residual keeps
    the truncation tail of order |S| * |V_tail|.
    """
    if u < t:
        raise InputError(f"residual requires u >= t, got t={t}, u={u}")
    kc, ka, kb, kcol = _kernel_terms(v)
    fc, fg, fh, frow = _transition_terms(s)
    val = 0j
    if kc.size:
        val += np.sum(kc * np.exp(ka * t + kb * u))
    if fc.size:
        val -= np.sum(fc * np.exp(fg * t + fh * u))
    if kc.size and fc.size:
        srates = np.add.outer(kb, fg)
        if np.any(srates.real >= 0):
            raise InputError("inconsistent tables: a product rate has nonnegative real part")
        # int_t^inf e^{a s} ds = -e^{a t}/a, so each pair contributes -kc*fc*e^{...}/(kb+fg)
        terms = -np.outer(kc, fc) * np.exp(np.add.outer(ka + kb, fg) * t + fh[None, :] * u) / srates
        if projected:
            keep = np.add.outer(kcol, frow) <= min(v.n_max, s.n_max)
            terms = np.where(keep, terms, 0.0)
        val -= np.sum(terms)
    return complex(val)


@dataclass(frozen=True)
class JumpCheck:
    """Residue of the series at a pole against its regular-solution multiple."""

    lhs: complex
    rhs: complex
    gap: float


def jump_relation_check(v: VTable, s: SpectralData, t: float, n: int, j: int,
                        pole_tol: float = POLE_TOL) -> JumpCheck:
    """Compare the (n, j) pole residue of the series with S_nj times the shifted branch.

    The right side is evaluated at depth N - n, the part of the series the
    truncated table determines; at that depth the identity is exact for a
    consistent pair.
    """
    order = v.order
    if n > v.n_max:
        raise TruncationError(f"pole index n={n} beyond table depth {v.n_max}", needed_depth=n)
    w = roots_of_unity(order)
    c = n / (1 - w[j])
    lhs = 0j
    for alpha in range(n, v.n_max + 1):
        lhs += v.table[j - 1, n - 1, alpha - 1] * np.exp((c - alpha) * t)
    k_nj_wj = (-1j * c) * w[j]
    rhs = s.table[n - 1, j - 1] * eval_f(v, t, k_nj_wj, depth=v.n_max - n, pole_tol=pole_tol)
    return JumpCheck(complex(lhs), complex(rhs), float(abs(lhs - rhs)))


def shift_spectral(s: SpectralData, a: complex) -> SpectralData:
    """Translation law on the data: S_nj -> e^{i n a} S_nj, Im a >= 0 only."""
    if complex(a).imag < 0:
        raise InputError(f"translation requires Im a >= 0, got {a}")
    return s.shifted(a)


def e_vector(order: Order, n_blocks: int, t: float) -> np.ndarray:
    """Flat boundary vector e_{nj}(t) = exp(n w_j t / (1 - w_j)), index (n-1)*J + (j-1)."""
    w = roots_of_unity(order)
    jc = order.j_count
    out = np.zeros(n_blocks * jc, dtype=complex)
    for n in range(1, n_blocks + 1):
        for j in range(1, jc + 1):
            out[(n - 1) * jc + (j - 1)] = np.exp(n * w[j] / (1 - w[j]) * t)
    return out


def k_vector(v: VTable, t: float, n_blocks: int) -> np.ndarray:
    """Flat moment vector int_t^inf K(t,u) exp(r w_l u / (1 - w_l)) du, index (r-1)*J + (l-1)."""
    order = v.order
    w = roots_of_unity(order)
    jc = order.j_count
    kc, ka, kb, _ = _kernel_terms(v)
    out = np.zeros(n_blocks * jc, dtype=complex)
    if kc.size == 0:
        return out
    for r in range(1, n_blocks + 1):
        for l in range(1, jc + 1):
            rate = kb + r * w[l] / (1 - w[l])
            out[(r - 1) * jc + (l - 1)] = np.sum(kc * np.exp(ka * t) * (-np.exp(rate * t) / rate))
    return out
