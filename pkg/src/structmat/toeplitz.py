"""Toeplitz and Hankel products, triangular Toeplitz inversion and division
with remainder.

Products by Toeplitz and Hankel matrices reduce to one polynomial product.
The inverse of a unit lower triangular Toeplitz matrix is the truncated
power-series inverse of its first column, computed by doubling: each level
costs two truncated products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from . import debug
from .arith import lg_abs, lg_max_abs, mag_exponent, root_magnitude_bounds, to_mpc, working
from .errors import LeadingCoefficientTooSmall, NonUnitDiagonal
from .plan import PrecisionPlan, plan_precision
from .poly import (ONE, ZERO, ApproxPoly, _fft_cheaper, add_coeffs, as_poly, inverse_transform,
                   mul_coeffs, transform)


@dataclass(frozen=True)
class ToeplitzMatrix:
    """``n x n`` matrix with entries ``t[i-j]``, given by first column and first row."""

    first_col: tuple
    first_row: tuple
    lam: float = math.inf

    def __post_init__(self):
        col = tuple(to_mpc(c) for c in self.first_col)
        row = tuple(to_mpc(c) for c in self.first_row)
        if len(col) != len(row) or not col:
            raise ValueError("first column and first row must have equal nonzero length")
        if col[0] != row[0]:
            raise ValueError("first column and first row disagree on the diagonal")
        object.__setattr__(self, "first_col", col)
        object.__setattr__(self, "first_row", row)

    @property
    def n(self) -> int:
        return len(self.first_col)

    def entry(self, i: int, j: int) -> mpc:
        return self.first_col[i - j] if i >= j else self.first_row[j - i]

    def dense(self) -> list[list[mpc]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def symbol(self) -> list:
        """Coefficients ``u_k = t[k - n + 1]`` for ``k = 0..2n-2``."""
        return list(reversed(self.first_row[1:])) + list(self.first_col)


@dataclass(frozen=True)
class HankelMatrix:
    """``n x n`` matrix with entries ``h[i+j]``; ``h`` has length ``2n - 1``."""

    h: tuple
    lam: float = math.inf

    def __post_init__(self):
        h = tuple(to_mpc(c) for c in self.h)
        if len(h) % 2 == 0:
            raise ValueError("Hankel generator must have odd length 2n-1")
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return (len(self.h) + 1) // 2

    def dense(self) -> list[list[mpc]]:
        return [[self.h[i + j] for j in range(self.n)] for i in range(self.n)]


@dataclass(frozen=True)
class TriToeplitz:
    """Lower triangular Toeplitz matrix given by its first column."""

    first_col: tuple
    lam: float = math.inf

    def __post_init__(self):
        col = tuple(to_mpc(c) for c in self.first_col)
        if not col:
            raise ValueError("empty column")
        object.__setattr__(self, "first_col", col)

    @property
    def n(self) -> int:
        return len(self.first_col)

    @property
    def is_normalized(self) -> bool:
        return self.first_col[0] == 1

    def normalized(self, prec: int | None = None) -> "TriToeplitz":
        d = self.first_col[0]
        p = prec or max(max(c.precision) for c in self.first_col)
        with working(p):
            col = (ONE,) + tuple(c / d for c in self.first_col[1:])
        return TriToeplitz(col, self.lam)

    def dense(self) -> list[list[mpc]]:
        n = self.n
        return [[self.first_col[i - j] if i >= j else ZERO for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class DivisionResult:
    q: ApproxPoly
    r: ApproxPoly
    plan: PrecisionPlan | None = None


def _vec(v) -> ApproxPoly:
    return as_poly(v)


def toeplitz_vec_mul(T: ToeplitzMatrix, v, ell: int) -> list:
    v = _vec(v)
    n = T.n
    if len(v) != n:
        raise ValueError("dimension mismatch")
    u = T.symbol()
    tau_u = mag_exponent(u)
    plan = plan_precision("mul", ell, tau1=tau_u, tau2=v.tau, d=max(2 * n - 2, 1))
    plan.require("T", T.lam)
    plan.require("v", v.lam)
    prod = mul_coeffs(u, list(v.coeffs), plan.working_p)
    if debug.enabled():
        K = 1 << max(1, (len(prod) - 1).bit_length())
        debug.check("multiplication", lg_max_abs(prod), tau_u + v.tau + 2 * math.log2(K), ell)
    return prod[n - 1: 2 * n - 1]


def hankel_vec_mul(H: HankelMatrix, v, ell: int) -> list:
    v = _vec(v)
    n = H.n
    if len(v) != n:
        raise ValueError("dimension mismatch")
    tau_h = mag_exponent(H.h)
    plan = plan_precision("mul", ell, tau1=tau_h, tau2=v.tau, d=max(2 * n - 2, 1))
    plan.require("H", H.lam)
    plan.require("v", v.lam)
    prod = mul_coeffs(list(H.h), list(reversed(v.coeffs)), plan.working_p)
    if debug.enabled():
        K = 1 << max(1, (len(prod) - 1).bit_length())
        debug.check("multiplication", lg_max_abs(prod), tau_h + v.tau + 2 * math.log2(K), ell)
    return prod[n - 1: 2 * n - 1]


# -- power-series inverse ---------------------------------------------------


def inverse_series(col: Sequence, k: int, mul: Callable, one=ONE, zero=ZERO) -> list:
    """First ``k`` coefficients of ``1 / c(x)`` where ``c(0) = 1``.

    ``mul`` multiplies two coefficient lists; passing an exact convolution
    runs the same doubling scheme over the rationals.
    """
    g = 1 << max(0, (k - 1).bit_length())
    c = list(col[:g]) + [zero] * max(0, g - len(col))
    return _inverse_rec(c, g, mul, one)[:k]


def _inverse_rec(c: list, g: int, mul: Callable, one) -> list:
    if g == 1:
        return [one]
    h = g // 2
    p = _inverse_rec(c, h, mul, one)
    step = getattr(mul, "newton_step", None)
    if step is not None:
        q = step(c, p, g)
    else:
        v = mul(c[1:g], p)[h - 1: g - 1]
        q = mul(p, v)[:h]
    return p + [-x for x in q]


class _FloatMul:
    """Floating-point products for :func:`inverse_series`.

    ``newton_step`` runs one doubling step with transforms of length ``g``:
    the first product is only needed in its middle, where the cyclic wrap
    does not reach, and the transform of ``p`` serves both products.
    """

    def __init__(self, prec: int):
        self.prec = prec

    def __call__(self, a, b):
        return mul_coeffs(a, b, self.prec)

    def newton_step(self, c: list, p: list, g: int) -> list:
        h = g // 2
        if not _fft_cheaper(g - 1, h, self.prec):
            v = self(c[1:g], p)[h - 1: g - 1]
            return self(p, v)[:h]
        fp = transform(p, g, self.prec)
        fc = transform(c[1:g], g, self.prec)
        with working(self.prec):
            fcp = fc * fp
        v = inverse_transform(fcp, self.prec)[h - 1: g - 1]
        fv = transform(v, g, self.prec)
        with working(self.prec):
            fpv = fp * fv
        return inverse_transform(fpv, self.prec)[:h]


def _fft_mul(prec: int) -> Callable:
    return _FloatMul(prec)


def tri_toeplitz_inverse(T: TriToeplitz, ell: int, rho: int | None = None) -> TriToeplitz:
    """First column of ``T^-1`` for unit lower triangular Toeplitz ``T``."""
    if not T.is_normalized:
        raise NonUnitDiagonal("diagonal entry must be 1; call normalized() first")
    n = T.n - 1
    if n == 0:
        return TriToeplitz((ONE,), ell)
    if rho is None:
        rho = root_magnitude_bounds(list(reversed(T.first_col))).rho
    rho = max(0, rho)
    tau = mag_exponent(T.first_col[1:])
    plan = plan_precision("tinv", ell, tau=tau, rho=rho, n=n)
    plan.require("T", T.lam)
    with working(plan.working_p):
        inv = inverse_series(T.first_col, n + 1, _fft_mul(plan.working_p))
    if debug.enabled():
        debug.check("t-inverse", lg_max_abs(inv), (rho + 1) * n + math.log2(n) + 1, ell)
    return TriToeplitz(tuple(inv), ell)


# -- division ----------------------------------------------------------------


def divisor_inverse(t: Sequence, k: int, prec: int) -> list:
    """``k`` terms of the series inverse of the reversed monic form of ``t``."""
    n = len(t) - 1
    lead = t[-1]
    with working(prec):
        col = [t[n - i] if lead == 1 else t[n - i] / lead for i in range(min(k, n + 1))]
    col[0] = ONE
    with working(prec):
        return inverse_series(col, k, _fft_mul(prec))


def divmod_coeffs(s: Sequence, t: Sequence, prec: int, inv: Sequence | None = None):
    """Quotient and remainder of ``s`` by ``t`` at ``prec`` bits.

    ``inv`` may carry a precomputed :func:`divisor_inverse` of ``t`` with at
    least ``len(s) - len(t) + 1`` terms. Returns ``(q, r, qm)`` where
    ``qm = lead(t) * q`` is the quotient by the monic divisor.
    """
    m, n = len(s) - 1, len(t) - 1
    if m < n:
        return [ZERO], list(s), [ZERO]
    lead = t[-1]
    if n == 0:
        with working(prec):
            q = [c / lead for c in s]
        return q, [ZERO], list(s)
    k = m - n + 1
    if inv is None or len(inv) < k:
        inv = divisor_inverse(t, k, prec)
    srev = [s[m - i] for i in range(k)]
    qm = mul_coeffs(list(inv[:k]), srev, prec)[:k][::-1]
    if lead == 1:
        q = qm
    else:
        with working(prec):
            q = [c / lead for c in qm]
    tq = mul_coeffs(list(t), q, prec)
    r = add_coeffs(list(s[:n]), tq[:n], prec, sign=-1)
    return q, r, qm


def poly_divide(s: ApproxPoly, t: ApproxPoly, ell: int, rho: int | None = None,
                strict: bool = False) -> DivisionResult:
    """Approximate ``s = t q + r`` with ``deg r < deg t``."""
    s, t = as_poly(s), as_poly(t)
    m, n = s.degree, t.degree
    if n < 1 or m < n:
        raise ValueError("need deg s >= deg t >= 1")
    lead = t[-1]
    if lead == 0 or lg_abs(lead) < -t.lam:
        raise LeadingCoefficientTooSmall("leading coefficient below the declared accuracy")
    if rho is None:
        rho = root_magnitude_bounds(t).rho
    rho = max(0, rho)
    plan = plan_precision("div", ell, strict, tau1=s.tau, tau2=t.tau, rho=rho,
                          n=max(n, m - n, 1))
    plan.require("s", s.lam)
    plan.require("t", t.lam)
    q, r, qm = divmod_coeffs(list(s.coeffs), list(t.coeffs), plan.working_p)
    if debug.enabled():
        ls = s.lg_norm()
        lm = math.log2(m)
        debug.check("quotient-remainder", lg_max_abs(qm), m + lm + m * rho + ls, ell)
        debug.check("quotient-remainder", lg_max_abs(r), m + n + lm + m * rho + ls, ell)
    return DivisionResult(ApproxPoly(tuple(q), ell), ApproxPoly(tuple(r), ell), plan)


def quotient_remainder_norm_bounds(m: int, n: int, rho: float, norm_F) -> tuple[mpfr, mpfr]:
    """Bounds on the quotient and remainder norms when dividing a degree-``m``
    polynomial by a monic degree-``n`` one whose roots lie in ``|z| <= 2^rho``."""
    e = m + (math.log2(m) if m > 0 else 0.0) + m * rho
    with gmpy2.context(precision=64, round=gmpy2.RoundUp):
        f = mpfr(norm_F)
        return f * gmpy2.exp2(mpfr(e)), f * gmpy2.exp2(mpfr(e + n))
