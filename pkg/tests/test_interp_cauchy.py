import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from structmat import oracle
from structmat.errors import CoincidentNodes, DuplicateNodes
from structmat.harness import rand_nodes, rand_vec
from structmat.interp_cauchy import (CauchySpec, InterpProblem, cauchy_solve, cauchy_solve_plan,
                                     cauchy_vec_mul,
                                     lagrange_interpolate, node_separations, trummer,
                                     vandermonde_solve)
from structmat.multipoint import NodeSet, multipoint_eval
from structmat.poly import ApproxPoly


def test_separations():
    deltas, lgp, dmin = node_separations([0, 1, 3])
    assert [float(d) for d in deltas] == [1, 1, 2] and lgp == 1 and dmin == 1
    deltas, _, _ = node_separations([1 + 1j, 4 + 5j])
    assert [float(d) for d in deltas] == [5, 5]
    with pytest.raises(ValueError):
        node_separations([2])


def test_interp_example():
    A = lagrange_interpolate(InterpProblem((0, 1, 2), (1, 2, 5)), 40)
    assert oracle.within(A.coeffs, [1, 0, 1], 40)


def test_interp_zero_values():
    A = lagrange_interpolate(InterpProblem((0, 1, 2, 3), (0, 0, 0, 0)), 40)
    assert oracle.within(A.coeffs, [0], 40)


def test_interp_shape_errors():
    with pytest.raises(ValueError):
        InterpProblem((0, 1), (1, 2, 3))
    with pytest.raises(DuplicateNodes):
        InterpProblem((0, 0), (1, 2))


def test_vandermonde_solve_is_interpolation():
    A = vandermonde_solve(InterpProblem((1, -1, 1j, -1j), (4, 0, 1 + 1j, 1 - 1j)), 40)
    want = [oracle.horner_eval(A.coeffs, x) for x in (1, -1, 1j, -1j)]
    assert oracle.within(want, [4, 0, 1 + 1j, 1 - 1j], 36)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 12), st.integers(0, 6), st.sampled_from([32, 64]), st.integers(0, 2**32))
def test_interp_eval_round_trip(n, tau, ell, seed):
    rng = random.Random(seed)
    A = rand_vec(rng, n, tau)
    xs = rand_nodes(rng, n, 1)
    ys = [oracle.horner_eval(A, x) for x in xs]
    # exact values of A at dyadic knots are dyadic, so they embed losslessly
    y = tuple(v.to_mpc(4096) for v in ys)
    back = lagrange_interpolate(InterpProblem(tuple(xs), y), ell)
    assert oracle.within(back.coeffs, A, ell)


def test_cauchy_examples():
    assert oracle.within(cauchy_vec_mul(CauchySpec((2,), (0,)), (3,), 40), [1.5], 40)
    out = cauchy_vec_mul(CauchySpec((2, 3), (0, 1)), (1, 1), 40)
    want = [oracle.ExactComplex(mpq(3, 2)), oracle.ExactComplex(mpq(5, 6))]
    assert oracle.within(out, want, 40)


def test_cauchy_coincident():
    with pytest.raises(CoincidentNodes):
        CauchySpec((0, 1), (1, 2))


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 10), st.integers(0, 6), st.sampled_from([32, 64]), st.integers(0, 2**32))
def test_cauchy_vs_naive(n, tau, ell, seed):
    rng = random.Random(seed)
    pts = rand_nodes(rng, 2 * n, 1)
    s, t = pts[:n], pts[n:]
    v = rand_vec(rng, n, tau)
    out = cauchy_vec_mul(CauchySpec(tuple(s), tuple(t)), v, ell)
    assert oracle.within(out, oracle.naive_structured_mul("cauchy", (s, t), v), ell)


def test_trummer_examples():
    assert oracle.within(trummer(NodeSet((0, 1)), (1, 1), 40), [-1, 1], 40)
    assert oracle.within(trummer(NodeSet((0, 1, 3, 2j)), (0, 0, 0, 0), 40), [0] * 4, 40)


@pytest.mark.parametrize("seed", range(4))
def test_trummer_antisymmetry(seed):
    rng = random.Random(seed)
    n, ell = 9, 48
    s = rand_nodes(rng, n, 1)
    out = trummer(NodeSet(tuple(s)), (1,) * n, ell)
    assert oracle.within(out, oracle.naive_structured_mul("trummer", s, [1] * n), ell)
    total = sum(oracle.exact_vec(out), oracle.ZERO)
    assert total.abs2() <= (mpq(n) * mpq(2) ** (-ell + 1)) ** 2


def test_cauchy_solve_single():
    v = cauchy_solve(CauchySpec((3,), (1,)), (5,), 40)
    assert oracle.within(v, [10], 40)


def test_cauchy_solve_zero_rhs():
    v = cauchy_solve(CauchySpec((0, 1, 2), (0.5, 1.5, 2.5)), (0, 0, 0), 40)
    assert oracle.within(v, [0, 0, 0], 40)


@pytest.mark.parametrize("seed", range(3))
def test_cauchy_solve_round_trip(seed):
    rng = random.Random(seed)
    n, ell = 5, 32
    pts = rand_nodes(rng, 2 * n, 1)
    s, t = pts[:n], pts[n:]
    w = rand_vec(rng, n, 2)
    r = oracle.naive_structured_mul("cauchy", (s, t), w)
    C = oracle.cauchy_matrix(s, t)
    assert oracle.exact_gauss_solve(C, r) == oracle.exact_vec(w)
    # r is rational: round it to what the plan asks for and declare that accuracy
    spec = CauchySpec(tuple(s), tuple(t))
    probe = ApproxPoly(tuple(x.to_mpc(64) for x in r))
    lam = cauchy_solve_plan(spec, probe, ell).lam
    rr = ApproxPoly(tuple(x.to_mpc(lam + 16) for x in r), lam=lam)
    v = cauchy_solve(spec, rr, ell)
    assert oracle.within(v, w, ell)


def _exact_diag(a, b):
    # a_i = prod_j (a_i - b_j) / prod_{j != i} (a_i - a_j)
    out = []
    for i, x in enumerate(a):
        num, den = oracle.ONE, oracle.ONE
        for y in b:
            num = num * (x - y)
        for j, y in enumerate(a):
            if j != i:
                den = den * (x - y)
        out.append(num / den)
    return out


@pytest.mark.parametrize("n", range(1, 7))
def test_inversion_formula_exact(n):
    rng = random.Random(n)
    pts = set()
    while len(pts) < 2 * n:
        pts.add((Fraction(rng.randint(-40, 40), rng.randint(1, 9)),
                 Fraction(rng.randint(-40, 40), rng.randint(1, 9))))
    pts = [oracle.ExactComplex(mpq(a.numerator, a.denominator), mpq(b.numerator, b.denominator))
           for a, b in pts]
    s, t = pts[:n], pts[n:]
    d1 = _exact_diag(t, s)
    d2 = _exact_diag(s, t)
    Cts, Cst = oracle.cauchy_matrix(t, s), oracle.cauchy_matrix(s, t)
    M = [[d1[i] * Cts[i][k] * d2[k] for k in range(n)] for i in range(n)]
    prod = [[sum((M[i][k] * Cst[k][j] for k in range(n)), oracle.ZERO) for j in range(n)]
            for i in range(n)]
    assert prod == [[oracle.ONE if i == j else oracle.ZERO for j in range(n)] for i in range(n)]
