import random

import gmpy2
import pytest
from gmpy2 import mpc, mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from structmat import oracle
from structmat.arith import to_mpc, working
from structmat.errors import InsufficientInputAccuracy
from structmat.harness import rand_vec
from structmat.plan import plan_precision
from structmat.poly import (ApproxPoly, fft_eval_unity, fft_interpolate_unity, mul_coeffs,
                           poly_mul, poly_square_times, scale_to_unit_disc, unscale)


def roots_of_unity(K, prec):
    with working(prec):
        pi2 = 2 * gmpy2.const_pi()
        return [mpc(gmpy2.cos(pi2 * i / K), gmpy2.sin(pi2 * i / K)) for i in range(K)]


def close(a, b, ell):
    return all(abs(complex(x) - complex(y)) <= 2.0 ** -ell for x, y in zip(a, b))


def test_approx_poly_zero():
    z = ApproxPoly.zero()
    assert z.degree == 0 and z.is_zero
    assert ApproxPoly((1, 0, 0)).degree == 2  # never trimmed


def test_fft_identity_on_fourth_roots():
    out = fft_eval_unity(ApproxPoly((0, 1)), 2, 40)
    assert close(out, [1, 1j, -1, -1j], 40)


def test_fft_constant():
    c = to_mpc((3, -2))
    assert all(v == c for v in fft_eval_unity(ApproxPoly((c,)), 3, 30))


def test_fft_too_short():
    with pytest.raises(ValueError):
        fft_eval_unity(ApproxPoly((1, 2, 3)), 1, 10)


def test_fft_input_accuracy_enforced():
    with pytest.raises(InsufficientInputAccuracy):
        fft_eval_unity(ApproxPoly((1, 2), lam=5), 2, 32)


@pytest.mark.parametrize("ell", [32, 64, 96])
def test_fft_matches_horner(ell):
    rng = random.Random(ell)
    A = rand_vec(rng, 8, 3)
    out = fft_eval_unity(ApproxPoly(tuple(A)), 3, ell)
    prec = 4 * plan_precision("fft", ell, tau=3, K=8).working_p
    want = [oracle.horner_mp(A, w, prec) for w in roots_of_unity(8, prec)]
    with working(prec):
        assert max(abs(a - b) for a, b in zip(out, want)) <= mpfr(2) ** -ell


def test_interpolate_examples():
    c = to_mpc((1, 1))
    P = fft_interpolate_unity([c] * 4, 40)
    assert close(P.coeffs, [c, 0, 0, 0], 40)
    P = fft_interpolate_unity([1, 1j, -1, -1j], 40)
    assert close(P.coeffs, [0, 1, 0, 0], 40)
    with pytest.raises(ValueError):
        fft_interpolate_unity([1, 2, 3], 10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6), st.integers(0, 8), st.sampled_from([32, 64, 96]), st.integers(0, 2**32))
def test_interpolate_round_trip(k, tau, ell, seed):
    rng = random.Random(seed)
    A = rand_vec(rng, 1 << k, tau)
    vals = fft_eval_unity(ApproxPoly(tuple(A)), k, ell + 2 * k + tau + 8)
    back = fft_interpolate_unity(vals, ell)
    assert oracle.within(back.coeffs, A, ell)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 7), st.integers(0, 12), st.sampled_from([32, 64, 96]), st.integers(0, 2**32))
def test_parseval(k, tau, ell, seed):
    rng = random.Random(seed)
    K = 1 << k
    A = rand_vec(rng, rng.randint(1, K), tau)
    vals = fft_eval_unity(ApproxPoly(tuple(A)), k, ell)
    lhs = sum(oracle.exact(v).abs2() for v in vals)
    rhs = K * sum(oracle.exact(a).abs2() for a in A)
    if rhs:
        assert abs(lhs - rhs) / rhs <= mpq(2) ** (-ell + k + tau)


def test_mul_examples():
    assert close(poly_mul(ApproxPoly((1, 1)), ApproxPoly((1, -1)), 40).coeffs, [1, 0, -1], 40)
    assert close(poly_mul(ApproxPoly((1, 1)), ApproxPoly((1, 1)), 40).coeffs, [1, 2, 1], 40)


def test_mul_random_degree_seven():
    rng = random.Random(7)
    A, B = rand_vec(rng, 8, 2), rand_vec(rng, 8, 2)
    out = poly_mul(ApproxPoly(tuple(A)), ApproxPoly(tuple(B)), 64)
    assert oracle.within(out.coeffs, oracle.exact_convolution(A, B), 64)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 64), st.integers(0, 64), st.integers(0, 12), st.sampled_from([32, 64, 96]),
       st.booleans(), st.integers(0, 2**32))
def test_mul_oracle(d1, d2, tau, ell, strict, seed):
    rng = random.Random(seed)
    A, B = rand_vec(rng, d1 + 1, tau), rand_vec(rng, d2 + 1, tau)
    out = poly_mul(ApproxPoly(tuple(A)), ApproxPoly(tuple(B)), ell, strict=strict)
    assert out.degree == d1 + d2
    assert oracle.within(out.coeffs, oracle.exact_convolution(A, B), ell)
    lead = oracle.exact(A[-1]) * oracle.exact(B[-1])
    assert oracle.within([out.coeffs[-1]], [lead], ell)


@pytest.mark.parametrize("method", ["fft", "school"])
def test_forced_method_matches_exact(method):
    rng = random.Random(3)
    for d in (0, 1, 5, 33, 64):
        A, B = rand_vec(rng, d + 1, 6), rand_vec(rng, d + 2, 6)
        p = plan_precision("mul", 64, tau1=6, tau2=6, d=d + 1).working_p
        assert oracle.within(mul_coeffs(A, B, p, method), oracle.exact_convolution(A, B), 64)


def test_square_times():
    rng = random.Random(5)
    P0, P1 = rand_vec(rng, 6, 2), rand_vec(rng, 4, 2)
    out = poly_square_times(ApproxPoly(tuple(P0)), ApproxPoly(tuple(P1)), 48)
    want = oracle.exact_convolution(oracle.exact_convolution(P0, P0), P1)
    assert oracle.within(out.coeffs, want, 48)


def test_scale_example():
    F = scale_to_unit_disc(ApproxPoly((-4, 1)), 2)
    assert [complex(c) for c in F.coeffs] == [-4, 4]
    assert unscale(F, 2).coeffs == ApproxPoly((-4, 1)).coeffs


def test_scale_identity():
    F = ApproxPoly((3, 2, 1), lam=50)
    G = scale_to_unit_disc(F, 0)
    assert G.coeffs == F.coeffs and G.lam == 50


def test_scale_roots_land_in_unit_disc():
    rng = random.Random(9)
    for rho in (1, 3, 5):
        rs = [oracle.ExactComplex(mpq(rng.randint(-(1 << rho), 1 << rho), 2),
                                  mpq(rng.randint(-(1 << rho), 1 << rho), 2)) for _ in range(5)]
        rs = [r for r in rs if r.abs2() <= 4 ** rho]
        F = [oracle.ONE]
        for r in rs:
            F = oracle.exact_convolution(F, [-r, oracle.ONE])
        G = scale_to_unit_disc(ApproxPoly(tuple(c.to_mpc(64) for c in F)), rho)
        # G(x) = 2^(rho d) prod (x - r / 2^rho)
        want = [oracle.ONE]
        for r in rs:
            want = oracle.exact_convolution(want, [-(r / (1 << rho)), oracle.ONE])
        want = [c * (1 << (rho * len(rs))) for c in want]
        assert oracle.exact_vec(G.coeffs) == want
        assert all((r / (1 << rho)).abs2() <= 1 for r in rs)
