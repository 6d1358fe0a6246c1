import math
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from structmat import oracle
from structmat.arith import root_magnitude_bounds, working
from structmat.errors import InsufficientInputAccuracy, LeadingCoefficientTooSmall, NonUnitDiagonal
from structmat.harness import rand_vec
from structmat.poly import ApproxPoly
from structmat.toeplitz import (HankelMatrix, ToeplitzMatrix, TriToeplitz, hankel_vec_mul,
                                inverse_series, poly_divide, quotient_remainder_norm_bounds,
                                toeplitz_vec_mul, tri_toeplitz_inverse)


def exact_matvec(M, v):
    v = oracle.exact_vec(v)
    return [sum((oracle.exact(a) * b for a, b in zip(row, v)), oracle.ZERO) for row in M]


def test_toeplitz_identity():
    T = ToeplitzMatrix((1, 0, 0), (1, 0, 0))
    assert oracle.within(toeplitz_vec_mul(T, (1, 2j, -3), 40), [1, 2j, -3], 40)


def test_toeplitz_hand_example():
    T = ToeplitzMatrix((1, 2), (1, 0))
    assert oracle.within(toeplitz_vec_mul(T, (1, 1), 40), [1, 3], 40)


def test_toeplitz_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ToeplitzMatrix((1, 2), (3, 0))
    with pytest.raises(ValueError):
        toeplitz_vec_mul(ToeplitzMatrix((1, 2), (1, 0)), (1, 2, 3), 10)


@pytest.mark.parametrize("ell", [32, 64, 96])
def test_toeplitz_random_vs_naive(ell):
    rng = random.Random(ell)
    col, row, v = rand_vec(rng, 16, 5), rand_vec(rng, 16, 5), rand_vec(rng, 16, 5)
    row[0] = col[0]
    out = toeplitz_vec_mul(ToeplitzMatrix(tuple(col), tuple(row)), v, ell)
    assert oracle.within(out, oracle.naive_structured_mul("toeplitz", (col, row), v), ell)


def test_hankel_examples():
    assert oracle.within(hankel_vec_mul(HankelMatrix((1, 0, 0)), (1, 1), 40), [1, 0], 40)
    out = hankel_vec_mul(HankelMatrix((1,) * 7), (1, 2, 3, 4j), 40)
    assert oracle.within(out, [6 + 4j] * 4, 40)
    with pytest.raises(ValueError):
        HankelMatrix((1, 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 64), st.integers(0, 12), st.sampled_from([32, 64, 96]), st.integers(0, 2**32))
def test_structured_products_vs_naive(n, tau, ell, seed):
    rng = random.Random(seed)
    h, v = rand_vec(rng, 2 * n - 1, tau), rand_vec(rng, n, tau)
    H = HankelMatrix(tuple(h))
    assert oracle.within(hankel_vec_mul(H, v, ell), exact_matvec(H.dense(), v), ell)
    col, row = h[n - 1:], h[: n][::-1]
    T = ToeplitzMatrix(tuple(col), tuple(row))
    assert oracle.within(toeplitz_vec_mul(T, v, ell), exact_matvec(T.dense(), v), ell)


def test_tri_inverse_identity():
    inv = tri_toeplitz_inverse(TriToeplitz((1, 0, 0, 0)), 40)
    assert oracle.within(inv.first_col, [1, 0, 0, 0], 40)


def test_tri_inverse_geometric():
    inv = tri_toeplitz_inverse(TriToeplitz((1, 1, 0, 0)), 40)
    assert oracle.within(inv.first_col, [1, -1, 1, -1], 40)


def test_tri_inverse_needs_unit_diagonal():
    with pytest.raises(NonUnitDiagonal):
        tri_toeplitz_inverse(TriToeplitz((2, 1)), 10)
    T = TriToeplitz((2, 1)).normalized(64)
    assert oracle.within(tri_toeplitz_inverse(T, 30).first_col, [1, -0.5], 30)


def test_tri_inverse_input_accuracy():
    with pytest.raises(InsufficientInputAccuracy):
        tri_toeplitz_inverse(TriToeplitz((1, 0.5, 0.25), lam=10), 32)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 3), st.sampled_from([32, 64, 96]), st.integers(0, 2**32))
def test_tri_inverse_identity_residual(n, tau, ell, seed):
    rng = random.Random(seed)
    col = [1] + rand_vec(rng, n, tau)
    inv = tri_toeplitz_inverse(TriToeplitz(tuple(col)), ell)
    assert oracle.within(inv.first_col, oracle.exact_series_inverse(col, n + 1), ell)
    rho = max(0, root_magnitude_bounds(list(reversed(col))).rho)
    # T * T~^-1 is lower triangular Toeplitz, so its first column is the whole residual
    prod = oracle.exact_convolution(col, inv.first_col)[: n + 1]
    bound = -ell + n * (rho + 1) + math.log2(n + 1) + 2
    assert oracle.lg_error(prod, [1] + [0] * n) <= bound


def test_inverse_series_exact_rationals():
    col = [oracle.exact(1), oracle.ExactComplex(mpq(1, 3)), oracle.ExactComplex(0, mpq(-2, 5))]
    got = inverse_series(col, 9, oracle.exact_convolution, oracle.ONE, oracle.ZERO)
    assert got == oracle.exact_series_inverse(col, 9)


def test_divide_examples():
    res = poly_divide(ApproxPoly((-1, 0, 1)), ApproxPoly((-1, 1)), 40)
    assert oracle.within(res.q.coeffs, [1, 1], 40) and oracle.within(res.r.coeffs, [0], 40)
    res = poly_divide(ApproxPoly((0, 0, 0, 1)), ApproxPoly((1, 1)), 40)
    assert oracle.within(res.q.coeffs, [1, -1, 1], 40) and oracle.within(res.r.coeffs, [-1], 40)


def test_divide_errors():
    with pytest.raises(ValueError):
        poly_divide(ApproxPoly((1, 1)), ApproxPoly((1, 1, 1)), 10)
    with pytest.raises(LeadingCoefficientTooSmall):
        poly_divide(ApproxPoly((1, 1, 1)), ApproxPoly((1, 0)), 10)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 12), st.integers(0, 4), st.sampled_from([32, 64, 96]),
       st.integers(0, 2**32))
def test_divide_vs_schoolbook(n, extra, tau, ell, seed):
    rng = random.Random(seed)
    t = rand_vec(rng, n, 1) + [1]
    s = rand_vec(rng, n + extra + 1, tau)
    res = poly_divide(ApproxPoly(tuple(s)), ApproxPoly(tuple(t)), ell)
    q, r = oracle.exact_divide(s, t)
    assert res.r.degree < n
    assert oracle.within(res.q.coeffs, q, ell)
    assert oracle.within(res.r.coeffs, r, ell)
    resid = [a - b for a, b in zip(oracle.exact_vec(s) + [oracle.ZERO],
                                   oracle.exact_convolution(t, res.q.coeffs))]
    resid = [a - (oracle.exact(res.r.coeffs[i]) if i < len(res.r) else oracle.ZERO)
             for i, a in enumerate(resid)]
    assert oracle.within(resid, [], ell - 1)


def test_divide_random_deg8_by_deg4():
    rng = random.Random(84)
    s, t = rand_vec(rng, 9, 3), rand_vec(rng, 5, 2)
    with working(64):
        t[-1] = t[-1] + 8
    res = poly_divide(ApproxPoly(tuple(s)), ApproxPoly(tuple(t)), 64)
    q, r = oracle.exact_divide(s, t)
    assert oracle.within(res.q.coeffs, q, 64) and oracle.within(res.r.coeffs, r, 64)


def test_norm_bounds_example():
    bq, br = quotient_remainder_norm_bounds(2, 1, 0, 1)
    assert bq == 8 and br == 16
    res = poly_divide(ApproxPoly((-1, 0, 1)), ApproxPoly((-1, 1)), 40)
    assert max(abs(complex(c)) for c in res.q.coeffs) <= bq
