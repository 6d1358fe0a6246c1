"""Exact and brute-force reference implementations.

Everything here runs over Gaussian rationals (``ExactComplex``) and is
quadratic or cubic by design. Dyadic floating-point inputs embed exactly, so
comparing a fast result against an oracle measures the true error.
"""

from __future__ import annotations

import math
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr, mpq


class ExactComplex:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def of(x) -> "ExactComplex":
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, mpc):
            return ExactComplex(mpq(x.real), mpq(x.imag))
        if isinstance(x, complex):
            return ExactComplex(mpq(mpfr(x.real, 53)), mpq(mpfr(x.imag, 53)))
        if isinstance(x, tuple):
            return ExactComplex(_rat(x[0]), _rat(x[1]))
        if hasattr(x, "re") and hasattr(x, "im"):
            return ExactComplex(_rat(x.re), _rat(x.im))
        return ExactComplex(_rat(x), 0)

    def __add__(self, o):
        o = ExactComplex.of(o)
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = ExactComplex.of(o)
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return ExactComplex.of(o) - self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, o):
        o = ExactComplex.of(o)
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = ExactComplex.of(o)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("exact division by zero")
        return ExactComplex((self.re * o.re + self.im * o.im) / d,
                            (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return ExactComplex.of(o) / self

    def __pow__(self, k: int):
        out = ExactComplex(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        try:
            o = ExactComplex.of(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"ExactComplex({self.re}, {self.im})"

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def to_mpc(self, prec: int) -> mpc:
        with gmpy2.context(precision=prec):
            return mpc(mpfr(self.re), mpfr(self.im))


def _rat(x) -> mpq:
    if isinstance(x, float):
        return mpq(mpfr(x, 53))
    return mpq(x)


ZERO = ExactComplex(0)
ONE = ExactComplex(1)


def exact(x) -> ExactComplex:
    return ExactComplex.of(x)


def exact_vec(v) -> list[ExactComplex]:
    return [ExactComplex.of(c) for c in v]


def exact_convolution(a: Sequence, b: Sequence) -> list[ExactComplex]:
    a, b = exact_vec(a), exact_vec(b)
    if not a or not b:
        return []
    out = [ExactComplex(0) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _trim(p: list) -> list:
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def exact_divide(s: Sequence, t: Sequence) -> tuple[list, list]:
    """Schoolbook long division: ``s = t q + r`` with ``deg r < deg t``."""
    s, t = exact_vec(s), _trim(exact_vec(t))
    if not t[-1]:
        raise ZeroDivisionError("zero divisor")
    n = len(t) - 1
    r = list(s)
    if len(r) - 1 < n:
        return [ExactComplex(0)], r
    q = [ExactComplex(0) for _ in range(len(r) - n)]
    lead = t[-1]
    for k in range(len(r) - 1 - n, -1, -1):
        c = r[k + n] / lead
        q[k] = c
        if c:
            for j in range(n + 1):
                r[k + j] = r[k + j] - c * t[j]
    rem = r[:n] if n > 0 else [ExactComplex(0)]
    return q, rem


def exact_series_inverse(col: Sequence, k: int) -> list[ExactComplex]:
    """First ``k`` terms of ``1 / c(x)`` for ``c(0) = 1`` by the term-by-term
    recurrence ``y_i = -sum_{j >= 1} c_j y_{i-j}``."""
    c = exact_vec(col)
    if c[0] != ONE:
        raise ValueError("constant term must be 1")
    y = [ONE]
    for i in range(1, k):
        acc = ExactComplex(0)
        for j in range(1, min(i, len(c) - 1) + 1):
            acc = acc + c[j] * y[i - j]
        y.append(-acc)
    return y[:k]


def horner_eval(p: Sequence, x) -> ExactComplex:
    x = ExactComplex.of(x)
    acc = ExactComplex(0)
    for c in reversed(exact_vec(p)):
        acc = acc * x + c
    return acc


def horner_mp(p: Sequence, x, prec: int) -> mpc:
    """Horner's rule in floating point at ``prec`` bits."""
    with gmpy2.context(precision=prec):
        x = mpc(x)
        acc = mpc(0)
        for c in reversed(list(p)):
            acc = acc * x + mpc(c)
    return acc


def naive_structured_mul(kind: str, data, v: Sequence) -> list[ExactComplex]:
    """Direct matrix-vector products.

    ``data`` is ``(first_col, first_row)`` for Toeplitz, the generator ``h``
    for Hankel, the nodes for Vandermonde, ``(s, t)`` for Cauchy and the
    nodes ``s`` for Trummer (zero diagonal).
    """
    v = exact_vec(v)
    n = len(v)
    if kind == "toeplitz":
        col, row = exact_vec(data[0]), exact_vec(data[1])
        entry = lambda i, j: col[i - j] if i >= j else row[j - i]
        return [sum((entry(i, j) * v[j] for j in range(n)), ExactComplex(0)) for i in range(n)]
    if kind == "hankel":
        h = exact_vec(data)
        return [sum((h[i + j] * v[j] for j in range(n)), ExactComplex(0)) for i in range(n)]
    if kind == "vandermonde":
        return [horner_eval(v, x) for x in exact_vec(data)]
    if kind == "cauchy":
        s, t = exact_vec(data[0]), exact_vec(data[1])
        return [sum((v[j] / (s[i] - t[j]) for j in range(n)), ExactComplex(0))
                for i in range(len(s))]
    if kind == "trummer":
        s = exact_vec(data)
        return [sum((v[j] / (s[i] - s[j]) for j in range(n) if j != i), ExactComplex(0))
                for i in range(n)]
    raise ValueError(f"unknown structured kind {kind!r}")


def cauchy_matrix(s: Sequence, t: Sequence) -> list[list[ExactComplex]]:
    s, t = exact_vec(s), exact_vec(t)
    return [[ONE / (si - tj) for tj in t] for si in s]


def exact_gauss_solve(C: Sequence[Sequence], r: Sequence) -> list[ExactComplex]:
    """Gaussian elimination with exact pivoting on the first nonzero entry."""
    n = len(C)
    A = [exact_vec(row) + [ExactComplex.of(r[i])] for i, row in enumerate(C)]
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[k], A[piv] = A[piv], A[k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    x = [ExactComplex(0) for _ in range(n)]
    for i in range(n - 1, -1, -1):
        acc = A[i][n]
        for j in range(i + 1, n):
            acc = acc - A[i][j] * x[j]
        x[i] = acc / A[i][i]
    return x


def exact_det(M: Sequence[Sequence]) -> ExactComplex:
    A = [exact_vec(row) for row in M]
    n = len(A)
    det = ExactComplex(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return ExactComplex(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            det = -det
        det = det * A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return det


def sylvester_matrix(f: Sequence, g: Sequence) -> list[list[ExactComplex]]:
    f, g = _trim(exact_vec(f)), _trim(exact_vec(g))
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([ZERO] * i + f[::-1] + [ZERO] * (size - m - 1 - i))
    for i in range(m):
        rows.append([ZERO] * i + g[::-1] + [ZERO] * (size - n - 1 - i))
    return rows


def exact_discriminant(f: Sequence):
    """``(-1)^(d(d-1)/2) Res(f, f') / a_d``; a rational when ``f`` is real."""
    f = _trim(exact_vec(f))
    d = len(f) - 1
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        disc = ExactComplex(1)
    else:
        df = [f[i] * i for i in range(1, d + 1)]
        res = exact_det(sylvester_matrix(f, df))
        disc = res / f[-1]
        if (d * (d - 1) // 2) % 2:
            disc = -disc
    return disc.re if disc.im == 0 else disc


def exact_separations(points: Sequence) -> list[mpq]:
    """Squared distance from each point to its nearest neighbour, by double loop."""
    pts = exact_vec(points)
    out = []
    for i, p in enumerate(pts):
        out.append(min(((p - q).abs2() for j, q in enumerate(pts) if j != i), default=None))
    return out


# -- error measurement -----------------------------------------------------


def abs2_error(approx, truth) -> mpq:
    return (ExactComplex.of(approx) - ExactComplex.of(truth)).abs2()


def max_abs2_error(approx: Sequence, truth: Sequence) -> mpq:
    a, t = list(approx), list(truth)
    n = max(len(a), len(t))
    a += [0] * (n - len(a))
    t += [0] * (n - len(t))
    return max((abs2_error(x, y) for x, y in zip(a, t)), default=mpq(0))


def within(approx: Sequence, truth: Sequence, ell: float) -> bool:
    """Exact test ``max |approx_i - truth_i| <= 2^-ell``; missing entries count as zero."""
    e = max_abs2_error(approx, truth)
    if math.isinf(ell):
        return e == 0
    k = 2 * ell
    if k == int(k):
        k = int(k)
        return e * (mpq(2) ** k if k >= 0 else 1) <= (1 if k >= 0 else mpq(2) ** (-k))
    return lg_error(approx, truth) <= -ell


def lg_error(approx: Sequence, truth: Sequence) -> float:
    """``log2`` of the max abs error, ``-inf`` when exact."""
    e = max_abs2_error(approx, truth)
    if e == 0:
        return -math.inf
    return float(gmpy2.log2(mpfr(e, 128))) / 2
