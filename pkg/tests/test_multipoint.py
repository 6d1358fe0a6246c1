import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structmat import oracle
from structmat.errors import DuplicateNodes, InsufficientInputAccuracy
from structmat.harness import rand_nodes, rand_vec
from structmat.multipoint import (NodeSet, build_tree, modular_reduce_many, mul_many,
                                  multipoint_eval, product_tree, remainder_tree, sum_rational,
                                  vandermonde_vec_mul)
from structmat.plan import plan_precision
from structmat.poly import ONE, ApproxPoly


def exact_from_roots(xs):
    out = [oracle.ONE]
    for x in xs:
        out = oracle.exact_convolution(out, [-oracle.exact(x), oracle.ONE])
    return out


def add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [oracle.ZERO] * (n - len(a))
    b = list(b) + [oracle.ZERO] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def test_tree_by_hand():
    tree = build_tree(NodeSet((0, 1, 2, 3)), 40)
    level1 = [oracle.exact_vec(c) for c in tree.levels[1]]
    assert level1 == [oracle.exact_vec([0, -1, 1]), oracle.exact_vec([6, -5, 1])]
    assert oracle.exact_vec(tree.root) == oracle.exact_vec([0, -6, 11, -6, 1])


def test_tree_single_node():
    tree = build_tree(NodeSet((3 + 1j,)), 20)
    assert tree.height == 0
    assert oracle.exact_vec(tree.root) == oracle.exact_vec([-3 - 1j, 1])


def test_tree_random_sixteen():
    rng = random.Random(16)
    xs = rand_nodes(rng, 16, 2)
    root = build_tree(NodeSet(tuple(xs)), 64).root
    assert oracle.within(root, exact_from_roots(xs), 64)


def test_tree_levels_are_child_products():
    rng = random.Random(2)
    xs = rand_nodes(rng, 11, 1)
    tree = build_tree(NodeSet(tuple(xs)), 48)
    for h in range(1, tree.height + 1):
        for j, node in enumerate(tree.levels[h]):
            a, b = tree.levels[h - 1][2 * j], tree.levels[h - 1][2 * j + 1]
            kids = [c for c in (a, b) if len(c) > 1]
            if not kids:
                continue
            want = kids[0] if len(kids) == 1 else oracle.exact_convolution(*kids)
            assert oracle.within(node, want, 48)


def test_nodeset_validation():
    with pytest.raises(DuplicateNodes):
        NodeSet((1, 2, 1))
    with pytest.raises(ValueError):
        NodeSet(())


def test_tree_cache_is_deterministic():
    rng = random.Random(8)
    ns = NodeSet(tuple(rand_nodes(rng, 9, 1)))
    a = build_tree(ns, 40)
    b = build_tree(ns, 40)
    assert a is b
    fresh = build_tree(NodeSet(ns.nodes), 40)
    assert fresh.levels == a.levels


def test_eval_square():
    out = multipoint_eval(ApproxPoly((0, 0, 1)), NodeSet((0, 1, 2)), 40)
    assert oracle.within(out, [0, 1, 4], 40)


def test_eval_constant():
    out = multipoint_eval(ApproxPoly((5 - 2j,)), NodeSet((0, 1, 2, 0.5j)), 40)
    assert oracle.within(out, [5 - 2j] * 4, 40)


def test_eval_input_accuracy():
    with pytest.raises(InsufficientInputAccuracy):
        multipoint_eval(ApproxPoly((1, 2, 3), lam=20), NodeSet((0, 1)), 32)


@pytest.mark.parametrize("ell", [32, 64, 96])
def test_eval_random_vs_horner(ell):
    rng = random.Random(ell)
    p = rand_vec(rng, 16, 4)
    xs = rand_nodes(rng, 16, 1)
    out = multipoint_eval(ApproxPoly(tuple(p)), NodeSet(tuple(xs)), ell)
    prec = 4 * plan_precision("fan-out", ell, tau1=4, rho=1, n=16).working_p
    want = [oracle.horner_mp(p, x, prec) for x in xs]
    assert oracle.within(out, want, ell)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 8), st.sampled_from([32, 64, 96]),
       st.integers(0, 2**32))
def test_eval_any_shape(deg, n, tau, ell, seed):
    rng = random.Random(seed)
    p = rand_vec(rng, deg + 1, tau)
    xs = rand_nodes(rng, n, 1)
    out = multipoint_eval(ApproxPoly(tuple(p)), NodeSet(tuple(xs)), ell)
    assert oracle.within(out, [oracle.horner_eval(p, x) for x in xs], ell)


def test_vandermonde_single_node():
    p = (1, 2j, -3, 0.5)
    assert oracle.within(vandermonde_vec_mul(NodeSet((1,)), p, 40), [-1.5 + 2j], 40)


def test_mul_many_examples():
    out = mul_many([ApproxPoly((-1, 1)), ApproxPoly((1, 1))], 40)
    assert oracle.within(out.coeffs, [-1, 0, 1], 40)
    one = ApproxPoly((1, 2, 3))
    assert oracle.within(mul_many([one], 40).coeffs, [1, 2, 3], 40)


def test_mul_many_linear_factors():
    rng = random.Random(88)
    xs = rand_nodes(rng, 8, 2)
    out = mul_many([ApproxPoly((-x, 1)) for x in xs], 64)
    assert oracle.within(out.coeffs, exact_from_roots(xs), 64)


def test_sum_rational_example():
    Q, P = sum_rational([(ApproxPoly((1,)), ApproxPoly((-1, 1))),
                         (ApproxPoly((1,)), ApproxPoly((1, 1)))], 40)
    assert oracle.within(Q.coeffs, [0, 2], 40)
    assert oracle.within(P.coeffs, [-1, 0, 1], 40)


def test_sum_rational_single_term():
    Q, P = sum_rational([(ApproxPoly((3, 1)), ApproxPoly((1, 0, 1)))], 40)
    assert oracle.within(Q.coeffs, [3, 1], 40) and oracle.within(P.coeffs, [1, 0, 1], 40)


def test_sum_rational_identity():
    rng = random.Random(17)
    m = 5
    Ps = [rand_vec(rng, 2, 1) + [1] for _ in range(m)]
    Qs = [rand_vec(rng, 2, 1) for _ in range(m)]
    Q, P = sum_rational([(ApproxPoly(tuple(q)), ApproxPoly(tuple(p))) for q, p in zip(Qs, Ps)], 64)
    prod = [oracle.ONE]
    for p in Ps:
        prod = oracle.exact_convolution(prod, p)
    assert oracle.within(P.coeffs, prod, 64)
    rhs = []
    for j in range(m):
        term = oracle.exact_vec(Qs[j])
        for k in range(m):
            if k != j:
                term = oracle.exact_convolution(term, Ps[k])
        rhs = add(rhs, term)
    assert oracle.within(Q.coeffs, rhs, 64)


def test_mod_examples():
    (r,) = modular_reduce_many(ApproxPoly((1, 0, 1)), [ApproxPoly((-1, 1))], 40)
    assert oracle.within(r.coeffs, [2], 40)
    r = modular_reduce_many(ApproxPoly((4, 1)), [ApproxPoly((1, 0, 1)), ApproxPoly((2, 1, 1))], 40)
    assert all(oracle.within(x.coeffs, [4, 1], 40) for x in r)


def test_mod_random_vs_schoolbook():
    rng = random.Random(21)
    moduli = [rand_vec(rng, 3, 1) + [1] for _ in range(4)]
    F = rand_vec(rng, 14, 3)
    out = modular_reduce_many(ApproxPoly(tuple(F)), [ApproxPoly(tuple(p)) for p in moduli], 64)
    for r, p in zip(out, moduli):
        assert oracle.within(r.coeffs, oracle.exact_divide(F, p)[1], 64)


def test_padding_is_neutral():
    rng = random.Random(5)
    moduli = [tuple(rand_vec(rng, 2, 1) + [1]) for _ in range(3)]
    F = rand_vec(rng, 7, 2)
    plain = remainder_tree(F, product_tree(moduli, 160))[:3]
    padded = remainder_tree(F, product_tree(moduli + [(ONE,)], 160))[:3]
    assert plain == padded
