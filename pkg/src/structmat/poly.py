"""Polynomials with declared accuracy, radix-2 FFT and polynomial products."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc

from . import debug
from .arith import lg_max_abs, mag_exponent, to_mpc, working
from .plan import plan_precision

ZERO = mpc(0, precision=(2, 2))
ONE = mpc(1, precision=(2, 2))


@dataclass(frozen=True)
class ApproxPoly:
    """Coefficient vector (lowest degree first) known to within ``2^-lam``.

    ``lam = inf`` declares the coefficients exact. The same type is used for
    plain vectors of complex entries.
    """

    coeffs: tuple
    lam: float = math.inf

    def __post_init__(self):
        cs = tuple(to_mpc(c) for c in self.coeffs) or (ZERO,)
        object.__setattr__(self, "coeffs", cs)

    @staticmethod
    def zero(lam: float = math.inf) -> "ApproxPoly":
        return ApproxPoly((ZERO,), lam)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @cached_property
    def tau(self) -> int:
        return mag_exponent(self.coeffs)

    def lg_norm(self) -> float:
        return lg_max_abs(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]


def as_poly(p, lam: float | None = None) -> ApproxPoly:
    if isinstance(p, ApproxPoly):
        return p if lam is None else ApproxPoly(p.coeffs, lam)
    return ApproxPoly(tuple(p), math.inf if lam is None else lam)


# -- FFT ---------------------------------------------------------------------


@lru_cache(maxsize=32)
def _bitrev(K: int) -> np.ndarray:
    k = K.bit_length() - 1
    r = np.zeros(K, dtype=np.int64)
    for i in range(K):
        r[i] = int(format(i, f"0{k}b")[::-1], 2) if k else 0
    return r


@lru_cache(maxsize=128)
def _twiddles_conj(K: int, prec: int) -> np.ndarray:
    tw = _twiddles(K, prec)
    with working(max(tw[0].precision)):
        return np.array([w.conjugate() for w in tw], dtype=object)


@lru_cache(maxsize=128)
def _twiddles(K: int, prec: int) -> np.ndarray:
    """``exp(2 pi i j / K)`` for ``j < K/2``, carried at ``prec + lg K`` extra bits."""
    lgk = max(1, K.bit_length() - 1)
    wp = prec + lgk + 8
    half = max(1, K // 2)
    out = np.empty(half, dtype=object)
    with working(wp):
        tau = 2 * gmpy2.const_pi()
        step = None
        for j in range(half):
            if j % 32 == 0:
                a = tau * j / K
                out[j] = mpc(gmpy2.cos(a), gmpy2.sin(a))
                if step is None:
                    a1 = tau / K
                    step = mpc(gmpy2.cos(a1), gmpy2.sin(a1))
            else:
                out[j] = out[j - 1] * step
    return out


def _fft(x: np.ndarray, prec: int, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 DFT ``X_i = sum_j x_j w^(ij)``, ``w = exp(+-2 pi i / K)``."""
    K = len(x)
    if K == 1:
        return x.copy()
    tw = _twiddles_conj(K, prec) if inverse else _twiddles(K, prec)
    with working(prec):
        y = x[_bitrev(K)]
        h = 1
        while h < K:
            y = y.reshape(-1, 2 * h)
            w = tw[:: K // (2 * h)][:h]
            a = y[:, :h]
            b = y[:, h:] * w if h > 1 else y[:, h:]
            y = np.concatenate([a + b, a - b], axis=1)
            h *= 2
        y = y.reshape(K)
        if inverse:
            # scaling by a power of two is exact
            y = y * (gmpy2.mpfr(1) / K)
    return y


def _array(vals: Sequence, K: int) -> np.ndarray:
    a = np.empty(K, dtype=object)
    a[: len(vals)] = list(vals)
    a[len(vals):] = ZERO
    return a


def _school(a: Sequence, b: Sequence, prec: int) -> list:
    with working(prec):
        if len(a) == 1:
            return [a[0] * v for v in b]
        if len(b) == 1:
            return [v * b[0] for v in a]
        return list(np.convolve(np.array(a, dtype=object), np.array(b, dtype=object)))


def _fft_cheaper(la: int, lb: int, prec: int) -> bool:
    # measured: one butterfly costs about five schoolbook terms at 64 to 2048 bits
    K = 1 << max(1, (la + lb - 2).bit_length())
    return la * lb > 5 * K * (K.bit_length() - 1)


def mul_coeffs(a: Sequence, b: Sequence, prec: int, method: str | None = None) -> list:
    """Product of two coefficient lists at ``prec`` bits.

    ``method`` forces ``"fft"`` or ``"school"``; by default the cheaper one
    by operation count is used.
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    n = la + lb - 1
    if method is None:
        method = "fft" if _fft_cheaper(la, lb, prec) else "school"
    if method == "school":
        return _school(a, b, prec)
    K = 1 << max(0, (n - 1).bit_length())
    fa = _fft(_array(a, K), prec)
    fb = fa if a is b else _fft(_array(b, K), prec)
    with working(prec):
        fc = fa * fb
    return list(_fft(fc, prec, inverse=True)[:n])


def transform(a: Sequence, K: int, prec: int) -> np.ndarray:
    """Values of ``a`` (zero padded to ``K``) at the ``K``-th roots of unity."""
    return _fft(_array(a, K), prec)


def inverse_transform(values: np.ndarray, prec: int) -> list:
    """Length-``K`` cyclic coefficients from values at the roots of unity."""
    return list(_fft(values, prec, inverse=True))


def add_coeffs(a: Sequence, b: Sequence, prec: int, sign: int = 1) -> list:
    n = max(len(a), len(b))
    with working(prec):
        out = []
        for i in range(n):
            x = a[i] if i < len(a) else None
            y = b[i] if i < len(b) else None
            if y is None:
                out.append(x)
            elif x is None:
                out.append(y if sign > 0 else -y)
            else:
                out.append(x + y if sign > 0 else x - y)
    return out


def derivative_coeffs(a: Sequence, prec: int) -> list:
    if len(a) <= 1:
        return [ZERO]
    with working(prec):
        return [a[i] * i for i in range(1, len(a))]


def eval_unity_coeffs(a: Sequence, K: int, prec: int) -> list:
    return list(_fft(_array(a, K), prec))


# -- public operations -----------------------------------------------------


def fft_eval_unity(A: ApproxPoly, k: int, ell: int) -> list:
    """Values of ``A`` at the ``K = 2^k`` powers of ``exp(2 pi i / K)``."""
    A = as_poly(A)
    K = 1 << k
    if K < A.degree + 1:
        raise ValueError(f"K = {K} is smaller than deg A + 1 = {A.degree + 1}")
    plan = plan_precision("fft", ell, tau=A.tau, K=K)
    plan.require("A", A.lam)
    out = eval_unity_coeffs(A.coeffs, K, plan.working_p)
    if debug.enabled():
        debug.check("fft", lg_max_abs(out), A.tau + math.log2(K), ell)
    return out


def fft_interpolate_unity(values, ell: int) -> ApproxPoly:
    """Coefficients of the polynomial of degree below ``K`` taking ``values``
    at the powers of ``exp(2 pi i / K)``; the inverse of :func:`fft_eval_unity`."""
    V = as_poly(values)
    K = len(V)
    if K & (K - 1):
        raise ValueError(f"K = {K} is not a power of two")
    # the inverse transform is a conjugate transform scaled by 1/K, so the same plan applies
    plan = plan_precision("fft", ell, tau=V.tau, K=K)
    plan.require("values", V.lam)
    out = _fft(_array(V.coeffs, K), plan.working_p, inverse=True)
    return ApproxPoly(tuple(out), ell)


def poly_mul(A: ApproxPoly, B: ApproxPoly, ell: int, strict: bool = False) -> ApproxPoly:
    A, B = as_poly(A), as_poly(B)
    d = max(A.degree, B.degree, 1)
    plan = plan_precision("mul", ell, strict, tau1=A.tau, tau2=B.tau, d=d)
    plan.require("A", A.lam)
    plan.require("B", B.lam)
    out = mul_coeffs(A.coeffs, B.coeffs, plan.working_p)
    if debug.enabled():
        K = 1 << max(1, (len(out) - 1).bit_length())
        debug.check("multiplication", lg_max_abs(out), A.tau + B.tau + 2 * math.log2(K), ell)
    return ApproxPoly(tuple(out), ell)


def poly_square_times(P0: ApproxPoly, P1: ApproxPoly, ell: int) -> ApproxPoly:
    """``P0^2 * P1`` by two FFT products at one working precision."""
    P0, P1 = as_poly(P0), as_poly(P1)
    d = max(P0.degree, P1.degree, 1)
    plan = plan_precision("p02p1", ell, tau0=P0.tau, tau1=P1.tau, d=d)
    plan.require("P0", P0.lam)
    plan.require("P1", P1.lam)
    p = plan.working_p
    out = mul_coeffs(mul_coeffs(P0.coeffs, P0.coeffs, p), P1.coeffs, p)
    return ApproxPoly(tuple(out), ell)


def scale_to_unit_disc(F: ApproxPoly, rho: int) -> ApproxPoly:
    """``F(2^rho x)``; exact, since only exponents change."""
    F = as_poly(F)
    out = []
    for i, c in enumerate(F.coeffs):
        with working(max(c.precision)):
            out.append(gmpy2.mul_2exp(c, rho * i))
    lam = F.lam - rho * F.degree if rho > 0 else F.lam
    return ApproxPoly(tuple(out), lam)


def unscale(F: ApproxPoly, rho: int) -> ApproxPoly:
    return scale_to_unit_disc(F, -rho)
