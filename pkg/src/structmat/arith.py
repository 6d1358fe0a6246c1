"""Arbitrary-precision complex scalars, rectangular interval boxes and
classical root and separation bounds.

Scalars are ``gmpy2.mpfr`` (real) and ``gmpy2.mpc`` (complex). Boxes keep
``mpfr`` endpoints on each axis and every endpoint is rounded outward, so a
box always contains the exact result of the scalar operation applied to any
points of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import NonPositiveDiscriminant, ZeroInBox, ZeroLeadingCoefficient

PrecFloat = mpfr
ComplexApprox = mpc

BOUND_PREC = 64


def working(prec: int):
    """Context manager running gmpy2 arithmetic at ``prec`` bits."""
    return gmpy2.context(precision=prec)


def _down(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


def _up(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


def exact_mpfr(x) -> mpfr:
    """Convert a dyadic rational (int, Fraction, mpq, float, mpfr) to mpfr without rounding."""
    if isinstance(x, mpfr):
        return x
    if isinstance(x, float):
        return mpfr(x, 53)
    q = mpq(x) if not isinstance(x, Fraction) else mpq(x.numerator, x.denominator)
    num, den = int(q.numerator), int(q.denominator)
    if den & (den - 1):
        raise ValueError(f"{x} is not a dyadic rational")
    bits = max(num.bit_length(), 2)
    with working(bits):
        return gmpy2.div_2exp(mpfr(num, bits), den.bit_length() - 1)


def to_mpc(x, prec: int | None = None) -> mpc:
    """Convert ``x`` to ``mpc``.

    With ``prec`` unset, ``x`` must be exactly representable (dyadic real and
    imaginary parts) and the conversion is lossless. With ``prec`` set the
    value is rounded to nearest at that precision.
    """
    if isinstance(x, mpc) and prec is None:
        return x
    if prec is not None:
        if isinstance(x, (Fraction,)):
            x = mpq(x.numerator, x.denominator)
        if isinstance(x, tuple):
            re, im = x
            with working(prec):
                return mpc(mpfr(_q(re)), mpfr(_q(im)))
        with working(prec):
            if isinstance(x, (complex, mpc)):
                return mpc(x)
            return mpc(mpfr(_q(x)), 0)
    if isinstance(x, tuple):
        re, im = (exact_mpfr(v) for v in x)
    elif isinstance(x, complex):
        re, im = mpfr(x.real, 53), mpfr(x.imag, 53)
    elif hasattr(x, "re") and hasattr(x, "im"):
        re, im = exact_mpfr(x.re), exact_mpfr(x.im)
    else:
        re, im = exact_mpfr(x), mpfr(0, 2)
    return mpc(re, im, precision=(max(re.precision, 2), max(im.precision, 2)))


def _q(x):
    if isinstance(x, (mpfr, int, float)):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def lg_abs(z) -> float:
    """log2 |z| rounded upward at ``BOUND_PREC`` bits (``-inf`` for zero)."""
    with _up(BOUND_PREC):
        a = abs(z) if isinstance(z, mpc) else abs(mpfr(z))
        if a == 0:
            return -math.inf
        return float(gmpy2.log2(a))


def lg_max_abs(values: Iterable) -> float:
    return max((lg_abs(v) for v in values), default=-math.inf)


def mag_exponent(values: Iterable) -> int:
    """Smallest integer ``tau >= 1`` with ``max |v| <= 2^tau``."""
    lg = lg_max_abs(values)
    return 1 if lg == -math.inf else max(1, math.ceil(lg))


# -- boxes -----------------------------------------------------------------


@dataclass(frozen=True)
class ComplexBox:
    re_lo: mpfr
    re_hi: mpfr
    im_lo: mpfr
    im_hi: mpfr
    valid: bool = True

    @staticmethod
    def point(z) -> "ComplexBox":
        z = to_mpc(z)
        return ComplexBox(z.real, z.real, z.imag, z.imag)

    @staticmethod
    def around(z, radius, prec: int | None = None) -> "ComplexBox":
        """Box of half-width ``radius`` (per axis) around ``z``, rounded outward."""
        z = to_mpc(z)
        prec = prec or max(z.precision)
        r = mpfr(radius) if not isinstance(radius, mpfr) else radius
        with _down(prec):
            rl, il = z.real - r, z.imag - r
        with _up(prec):
            rh, ih = z.real + r, z.imag + r
        return ComplexBox(rl, rh, il, ih)

    @property
    def widths(self) -> tuple[mpfr, mpfr]:
        with _up(BOUND_PREC):
            return self.re_hi - self.re_lo, self.im_hi - self.im_lo

    def wid(self) -> mpfr:
        return max(self.widths)

    def contains(self, z) -> bool:
        if isinstance(z, mpc):
            re, im = z.real, z.imag
        elif hasattr(z, "re"):
            re, im = z.re, z.im
        else:
            z = to_mpc(z)
            re, im = z.real, z.imag
        return bool(self.re_lo <= re <= self.re_hi and self.im_lo <= im <= self.im_hi)

    def contains_zero(self) -> bool:
        return bool(self.re_lo <= 0 <= self.re_hi and self.im_lo <= 0 <= self.im_hi)

    def mid(self, prec: int | None = None) -> mpc:
        p = prec or max(self.re_lo.precision, self.re_hi.precision,
                        self.im_lo.precision, self.im_hi.precision) + 2
        with working(p):
            return mpc((self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2)

    def mag_upper(self) -> mpfr:
        with _up(BOUND_PREC):
            x = max(abs(self.re_lo), abs(self.re_hi))
            y = max(abs(self.im_lo), abs(self.im_hi))
            return gmpy2.sqrt(x * x + y * y)

    def mag_lower(self) -> mpfr:
        with _down(BOUND_PREC):
            x2, y2 = _sq_lo(self.re_lo, self.re_hi), _sq_lo(self.im_lo, self.im_hi)
            return gmpy2.sqrt(x2 + y2)


def _sq_lo(lo, hi):
    if lo <= 0 <= hi:
        return mpfr(0)
    m = min(abs(lo), abs(hi))
    return m * m


def _sq_hi(lo, hi):
    m = max(abs(lo), abs(hi))
    return m * m


def _finish(re_lo, re_hi, im_lo, im_hi) -> ComplexBox:
    ok = all(gmpy2.is_finite(v) for v in (re_lo, re_hi, im_lo, im_hi))
    if not ok:
        inf = mpfr("inf")
        return ComplexBox(-inf, inf, -inf, inf, valid=False)
    return ComplexBox(re_lo, re_hi, im_lo, im_hi)


def _prec(prec):
    return prec or gmpy2.get_context().precision


def box_add(a: ComplexBox, b: ComplexBox, prec: int | None = None) -> ComplexBox:
    p = _prec(prec)
    with _down(p):
        rl, il = a.re_lo + b.re_lo, a.im_lo + b.im_lo
    with _up(p):
        rh, ih = a.re_hi + b.re_hi, a.im_hi + b.im_hi
    return _finish(rl, rh, il, ih)


def box_neg(a: ComplexBox) -> ComplexBox:
    # negation is exact once the context holds every endpoint's precision
    p = max(v.precision for v in (a.re_lo, a.re_hi, a.im_lo, a.im_hi))
    with working(p):
        return ComplexBox(-a.re_hi, -a.re_lo, -a.im_hi, -a.im_lo, a.valid)


def box_sub(a: ComplexBox, b: ComplexBox, prec: int | None = None) -> ComplexBox:
    return box_add(a, box_neg(b), prec)


def _rmul(alo, ahi, blo, bhi, p):
    with _down(p):
        lo = min(alo * blo, alo * bhi, ahi * blo, ahi * bhi)
    with _up(p):
        hi = max(alo * blo, alo * bhi, ahi * blo, ahi * bhi)
    return lo, hi


def box_mul(a: ComplexBox, b: ComplexBox, prec: int | None = None) -> ComplexBox:
    p = _prec(prec)
    ac = _rmul(a.re_lo, a.re_hi, b.re_lo, b.re_hi, p)
    bd = _rmul(a.im_lo, a.im_hi, b.im_lo, b.im_hi, p)
    ad = _rmul(a.re_lo, a.re_hi, b.im_lo, b.im_hi, p)
    bc = _rmul(a.im_lo, a.im_hi, b.re_lo, b.re_hi, p)
    with _down(p):
        rl, il = ac[0] - bd[1], ad[0] + bc[0]
    with _up(p):
        rh, ih = ac[1] - bd[0], ad[1] + bc[1]
    return _finish(rl, rh, il, ih)


def box_recip(a: ComplexBox, prec: int | None = None) -> ComplexBox:
    """Enclosure of ``{1/z : z in a}`` computed as ``conj(z) / |z|^2``."""
    if a.contains_zero():
        raise ZeroInBox("reciprocal of a box containing the origin")
    p = _prec(prec)
    with _down(p):
        dl = _sq_lo(a.re_lo, a.re_hi) + _sq_lo(a.im_lo, a.im_hi)
    with _up(p):
        dh = _sq_hi(a.re_lo, a.re_hi) + _sq_hi(a.im_lo, a.im_hi)
    rl, rh = _rdiv(a.re_lo, a.re_hi, dl, dh, p)
    yl, yh = _rdiv(a.im_lo, a.im_hi, dl, dh, p)
    with working(p):
        return _finish(rl, rh, -yh, -yl)


def _rdiv(lo, hi, dl, dh, p):
    # [lo, hi] / [dl, dh] with 0 < dl <= dh
    with _down(p):
        rl = lo / dh if lo >= 0 else lo / dl
    with _up(p):
        rh = hi / dl if hi >= 0 else hi / dh
    return rl, rh


# -- root and separation bounds ---------------------------------------------


@dataclass(frozen=True)
class RootBounds:
    lower: mpfr
    upper: mpfr
    rho: int
    degenerate: bool = False


def _coeffs(f) -> list[mpc]:
    cs = f.coeffs if hasattr(f, "coeffs") else f
    return [c if isinstance(c, mpc) else to_mpc(c) for c in cs]


def _norm2(cs, up: bool) -> mpfr:
    ctx = _up if up else _down
    with ctx(BOUND_PREC):
        s = mpfr(0)
        for c in cs:
            s += c.real * c.real + c.imag * c.imag
        return gmpy2.sqrt(s)


def _is_integral(cs) -> bool:
    return all(gmpy2.is_integer(c.real) and gmpy2.is_integer(c.imag) for c in cs)


def root_magnitude_bounds(f) -> RootBounds:
    cs = _coeffs(f)
    d = len(cs) - 1
    if d < 0 or cs[-1] == 0:
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    with _down(BOUND_PREC):
        ad_lo, a0_lo = abs(cs[-1]), abs(cs[0])
    upper = _div_up(_norm2(cs, True), ad_lo)
    lower = _div_down(a0_lo, _norm2(cs, True))
    if d > 0 and _is_integral(cs):
        with _up(BOUND_PREC):
            m = max(abs(c) for c in cs[:-1])
            cauchy = 1 + m / ad_lo
        upper = min(upper, cauchy)
        if cs[0] != 0:
            with _up(BOUND_PREC):
                m0 = max(abs(c) for c in cs[1:])
            with _down(BOUND_PREC):
                lower = max(lower, a0_lo / (a0_lo + m0))
    rho = math.ceil(float(gmpy2.log2(upper))) if upper > 0 else 0
    return RootBounds(lower, upper, rho, degenerate=bool(cs[0] == 0))


def _div_up(a, b):
    with _up(BOUND_PREC):
        return a / b


def _div_down(a, b):
    with _down(BOUND_PREC):
        return a / b


def aggregate_separation_lower_bound(f, discriminant_magnitude, k: int) -> mpfr:
    """Lower bound on a product of ``k`` root distances of a square-free ``f``."""
    cs = _coeffs(f)
    d = len(cs) - 1
    disc = mpfr(discriminant_magnitude) if not isinstance(discriminant_magnitude, mpfr) \
        else discriminant_magnitude
    if disc <= 0:
        raise NonPositiveDiscriminant("discriminant magnitude must be positive")
    norm = _norm2(cs, True)
    with _down(BOUND_PREC):
        a0 = abs(cs[0])
        b = gmpy2.mul_2exp(mpfr(1), k - d - d * (d - 1) // 2)
        b *= a0 ** k
        b *= gmpy2.sqrt(disc)
    e = d + k - 1
    if e > 0:
        with _up(BOUND_PREC):
            ne = norm ** e
        with _down(BOUND_PREC):
            b = b / ne
    return b


def integer_aggregate_separation_exponent(d: int, tau: int) -> float:
    """Upper bound on ``-lg`` of a product of root distances of an integer polynomial."""
    return 3 * d * d + 3 * d * tau + 4 * d * (math.log2(d) if d > 0 else 0.0)


def eval_lower_bound(f, dist_to_closest_root, lg_prod_delta) -> mpfr:
    """Lower bound on ``|f(L)|`` given the distance from ``L`` to its closest root."""
    cs = _coeffs(f)
    dist = mpfr(dist_to_closest_root)
    if dist == 0:
        return mpfr(0)
    norm = _norm2(cs, True)
    with _up(BOUND_PREC):
        n6 = norm ** 6
    with _down(BOUND_PREC):
        ad = abs(cs[-1])
        b = ad ** 7 * dist ** 6
        b = b / n6
        b = b * gmpy2.exp2(mpfr(lg_prod_delta) - 6)
    return b


def separations(points: Sequence[mpc], prec: int = BOUND_PREC) -> list[mpfr]:
    """Local separations ``min_{j != i} |x_i - x_j|``, correctly rounded at ``prec``.

    Squared distances are compared exactly in rational arithmetic; only the
    winning distance is rounded.
    """
    qs = [(mpq(z.real), mpq(z.imag)) for z in points]
    out = []
    for i, (a, b) in enumerate(qs):
        best, arg = None, -1
        for j, (c, e) in enumerate(qs):
            if i != j:
                d2 = (a - c) ** 2 + (b - e) ** 2
                if best is None or d2 < best:
                    best, arg = d2, j
        if arg < 0:
            out.append(mpfr("inf"))
            continue
        out.append(exact_distance(points[i], points[arg], prec))
    return out


def exact_distance(z, w, prec: int = BOUND_PREC) -> mpfr:
    """``|z - w|`` correctly rounded to nearest at ``prec`` bits."""
    d = to_mpc((mpq(z.real) - mpq(w.real), mpq(z.imag) - mpq(w.imag)))
    with working(prec):
        return abs(d)
