"""Subproduct trees, remainder trees and their applications: multipoint
evaluation, products of many polynomials, sums of rational functions and
reduction modulo many polynomials.

Trees are complete binary trees over a power-of-two number of leaves. Missing
leaves are the constant polynomial 1, whose products are copies, so padding
never changes a computed value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from gmpy2 import mpc

from . import debug
from .arith import lg_max_abs, mag_exponent, root_magnitude_bounds, separations, to_mpc, working
from .errors import DuplicateNodes
from .plan import PrecisionPlan, plan_precision
from .poly import ONE, ZERO, ApproxPoly, add_coeffs, as_poly, mul_coeffs
from .toeplitz import divisor_inverse, divmod_coeffs

PAD = (ONE,)


def _pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


@dataclass(frozen=True)
class SubproductTree:
    """``levels[0]`` holds the leaves and ``levels[-1]`` the single root."""

    levels: tuple
    counts: tuple
    prec: int
    _inv: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def root(self) -> tuple:
        return self.levels[-1][0]

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def inverse(self, h: int, j: int, k: int) -> list:
        """Series inverse of node ``(h, j)``, reversed, with at least ``k`` terms."""
        inv = self._inv.get((h, j))
        if inv is None or len(inv) < k:
            inv = divisor_inverse(self.levels[h][j], k, self.prec)
            self._inv[(h, j)] = inv
        return inv


def _monic_mul(a: Sequence, b: Sequence, prec: int) -> list:
    # (x^da + a')(x^db + b'): multiplying only the tails halves the FFT length
    da, db = len(a) - 1, len(b) - 1
    c = mul_coeffs(list(a[:da]), list(b[:db]), prec) + [ZERO, ZERO]
    with working(prec):
        for i in range(da):
            c[db + i] += a[i]
        for i in range(db):
            c[da + i] += b[i]
    c[da + db] = ONE
    return c


def product_tree(leaves: Sequence[Sequence], prec: int, monic: bool = False) -> SubproductTree:
    """Balanced product tree. With ``monic`` the top coefficient of every
    product is set to exactly 1 (valid when all leaves are monic)."""
    size = _pow2(len(leaves))
    level = [tuple(c) for c in leaves] + [PAD] * (size - len(leaves))
    counts = [1] * len(leaves) + [0] * (size - len(leaves))
    levels, cnts = [tuple(level)], [tuple(counts)]
    while len(level) > 1:
        nxt, nc = [], []
        for j in range(0, len(level), 2):
            a, b = level[j], level[j + 1]
            if b is PAD:
                nxt.append(a)
            elif a is PAD:
                nxt.append(b)
            else:
                nxt.append(tuple(_monic_mul(a, b, prec) if monic else mul_coeffs(a, b, prec)))
            nc.append(counts[j] + counts[j + 1])
        level, counts = nxt, nc
        levels.append(tuple(level))
        cnts.append(tuple(counts))
    return SubproductTree(tuple(levels), tuple(cnts), prec)


def remainder_tree(F: Sequence, tree: SubproductTree) -> list:
    """``F mod`` every leaf of ``tree``; ``None`` marks padding leaves."""
    prec = tree.prec
    top = tree.root
    r = list(F)
    if len(r) >= len(top) and top is not PAD:
        r = divmod_coeffs(r, top, prec, tree.inverse(tree.height, 0, len(r) - len(top) + 1))[1]
    rems = [r]
    for h in range(tree.height - 1, -1, -1):
        nxt = []
        for j, node in enumerate(tree.levels[h]):
            parent = rems[j // 2]
            if node is PAD or parent is None:
                nxt.append(None)
            elif len(parent) < len(node):
                nxt.append(parent)
            else:
                inv = tree.inverse(h, j, len(parent) - len(node) + 1)
                nxt.append(divmod_coeffs(parent, node, prec, inv)[1])
        rems = nxt
    return rems


# -- node sets -----------------------------------------------------------------


@dataclass(frozen=True)
class NodeSet:
    """Distinct complex nodes known to within ``2^-lam``."""

    nodes: tuple
    lam: float = math.inf
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        xs = tuple(to_mpc(x) for x in self.nodes)
        if not xs:
            raise ValueError("empty node set")
        if len({(x.real, x.imag) for x in xs}) != len(xs):
            raise DuplicateNodes("repeated node")
        object.__setattr__(self, "nodes", xs)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    @cached_property
    def tau(self) -> int:
        return mag_exponent(self.nodes)

    @cached_property
    def rho(self) -> int:
        lg = lg_max_abs(self.nodes)
        return 0 if lg <= 0 else math.ceil(lg)

    @cached_property
    def deltas(self) -> tuple:
        if self.n == 1:
            return ()
        ds = tuple(separations(self.nodes))
        if self.lam != math.inf and min(ds) < 2.0 ** (-self.lam):
            raise DuplicateNodes("nodes closer than the declared accuracy")
        return ds

    @cached_property
    def lg_prod_delta(self) -> float:
        from gmpy2 import log2
        return float(sum(log2(d) for d in self.deltas))

    @property
    def min_delta(self):
        return min(self.deltas) if self.deltas else math.inf

    def tree(self, prec: int) -> SubproductTree:
        t = self._cache.get(("tree", prec))
        if t is None:
            with working(max(max(x.precision) for x in self.nodes)):
                leaves = [(-x, ONE) for x in self.nodes]
            t = product_tree(leaves, prec, monic=True)
            self._cache[("tree", prec)] = t
        return t

    def batches(self, size: int) -> tuple:
        b = self._cache.get(("batches", size))
        if b is None:
            b = tuple(NodeSet(self.nodes[i:i + size], self.lam)
                      for i in range(0, self.n, size))
            self._cache[("batches", size)] = b
        return b


def _fan_in_check(tree: SubproductTree, tau: int, n: int, ell: float) -> None:
    if not debug.enabled():
        return
    bound = n * tau + 8 * n - 2 * math.log2(n) - 8
    for level in tree.levels[1:]:
        for node in level:
            if node is not PAD:
                debug.check("fan-in", lg_max_abs(node), bound, ell)


def build_tree(ns: NodeSet, ell: int) -> SubproductTree:
    """Subproduct tree of ``prod (x - x_i)`` with every node within ``2^-ell``."""
    plan = plan_precision("fan-in", ell, tau=ns.tau, n=ns.n)
    plan.require("nodes", ns.lam)
    tree = ns.tree(plan.working_p)
    _fan_in_check(tree, ns.tau, ns.n, ell)
    return tree


def multipoint_plan(p: ApproxPoly, ns: NodeSet, ell: int) -> PrecisionPlan:
    out = plan_precision("fan-out", ell, tau1=p.tau, rho=ns.rho, n=ns.n)
    tin = plan_precision("fan-in", out.lam, tau=ns.tau, n=ns.n)
    return PrecisionPlan(ell, out.lam, max(out.working_p, tin.working_p), "fan-out",
                         out.params, (out, tin))


def eval_coeffs(p: Sequence, ns: NodeSet, prec: int) -> list:
    """Values of ``p`` at every node at ``prec`` bits via the remainder tree."""
    tree = ns.tree(prec)
    rems = remainder_tree(p, tree)
    return [r[0] for r in rems[: ns.n]]


def multipoint_eval(p: ApproxPoly, ns: NodeSet, ell: int, working_p: int | None = None) -> list:
    """``p(x_i)`` for every node, each within ``2^-ell``.

    ``working_p`` overrides the precision plan and skips the input-accuracy
    check; the caller then owns the error analysis.
    """
    p = as_poly(p)
    size = 2 * (p.degree + 1)
    if ns.n > size:
        out = []
        for b in ns.batches(size):
            out.extend(multipoint_eval(p, b, ell, working_p))
        return out
    if working_p is None:
        plan = multipoint_plan(p, ns, ell)
        fan_out, fan_in = plan.parts
        plan.require("p", p.lam, fan_out.lam)
        plan.require("nodes", ns.lam, fan_in.lam)
        working_p = plan.working_p
        _fan_in_check(ns.tree(working_p), ns.tau, ns.n, fan_out.lam)
    return eval_coeffs(list(p.coeffs), ns, working_p)


def vandermonde_vec_mul(ns: NodeSet, p, ell: int) -> list:
    return multipoint_eval(as_poly(p), ns, ell)


# -- products and sums ---------------------------------------------------------


def _lg(x: float) -> float:
    return math.log2(x) if x > 0 else 0.0


def mul_many(polys: Sequence[ApproxPoly], ell: int) -> ApproxPoly:
    """Product of ``m`` polynomials by a balanced binary tree."""
    polys = [as_poly(P) for P in polys]
    if not polys:
        return ApproxPoly((ONE,), math.inf)
    m = len(polys)
    tau = max(P.tau for P in polys)
    n = max(max(P.degree for P in polys), 1)
    plan = plan_precision("mul-many", ell, tau=tau, m=m, n=n)
    for i, P in enumerate(polys):
        plan.require(f"P[{i}]", P.lam)
    tree = product_tree([P.coeffs for P in polys], plan.working_p)
    if debug.enabled():
        for level, counts in zip(tree.levels[1:], tree.counts[1:]):
            for node, k in zip(level, counts):
                if k > 1:
                    bound = k * tau + (k - 1) * _lg(n) + 4 * k - _lg(k) - 4
                    debug.check("m-product", lg_max_abs(node), bound, ell)
    return ApproxPoly(tree.root, ell)


def rational_sum_coeffs(numers: Sequence[Sequence], denoms: SubproductTree, prec: int,
                        check: tuple | None = None) -> list:
    """Numerator of ``sum_j numers[j] / leaf_j`` over the product ``denoms.root``.

    ``check = (tau1, tau2, n, ell)`` enables the debug norm assertions.
    """
    size = len(denoms.levels[0])
    level = [tuple(q) for q in numers] + [None] * (size - len(numers))
    for h in range(denoms.height):
        dens, counts = denoms.levels[h], denoms.counts[h + 1]
        nxt = []
        for j in range(0, len(level), 2):
            a, b = level[j], level[j + 1]
            if b is None:
                nxt.append(a)
            elif a is None:
                nxt.append(b)
            else:
                x = mul_coeffs(a, dens[j + 1], prec)
                y = mul_coeffs(b, dens[j], prec)
                nxt.append(tuple(add_coeffs(x, y, prec)))
        level = nxt
        if check is not None and debug.enabled():
            tau1, tau2, n, ell = check
            for node, den, k in zip(level, denoms.levels[h + 1], counts):
                if node is not None and k > 1:
                    lq = tau1 + (k - 1) * (tau2 + _lg(n)) + 5 * k - _lg(k) - 4
                    lp = k * tau2 + (k - 1) * _lg(n) + 4 * k - _lg(k) - 4
                    debug.check("rational-sum", lg_max_abs(node), lq, ell)
                    debug.check("rational-sum", lg_max_abs(den), lp, ell)
    return list(level[0]) if level[0] is not None else [ZERO]


def sum_rational(terms: Sequence[tuple], ell: int) -> tuple[ApproxPoly, ApproxPoly]:
    """``Q / P = sum_j Q_j / P_j`` as a numerator and denominator pair."""
    qs = [as_poly(q) for q, _ in terms]
    ps = [as_poly(p) for _, p in terms]
    if not terms:
        return ApproxPoly.zero(), ApproxPoly((ONE,))
    m = len(terms)
    tau1 = max(q.tau for q in qs)
    tau2 = max(p.tau for p in ps)
    n = max(max(p.degree for p in ps), 1)
    plan = plan_precision("rat-sum", ell, tau1=tau1, tau2=tau2, m=m, n=n)
    for i in range(m):
        plan.require(f"Q[{i}]", qs[i].lam)
        plan.require(f"P[{i}]", ps[i].lam)
    prec = plan.working_p
    tree = product_tree([p.coeffs for p in ps], prec)
    num = rational_sum_coeffs([q.coeffs for q in qs], tree, prec, (tau1, tau2, n, ell))
    return ApproxPoly(tuple(num), ell), ApproxPoly(tree.root, ell)


def modular_reduce_many(F: ApproxPoly, moduli: Sequence[ApproxPoly], ell: int) -> list:
    """``F mod P_j`` for every modulus, by a product tree then a remainder tree."""
    F = as_poly(F)
    ps = [as_poly(p) for p in moduli]
    m = len(ps)
    n = max(p.degree for p in ps)
    if n < 1:
        raise ValueError("moduli must have positive degree")
    if F.degree > 2 * m * n:
        raise ValueError("deg F exceeds 2mn; reduce F modulo the product first")
    rho = max(0, max(root_magnitude_bounds(p).rho for p in ps))
    plan = plan_precision("mod", ell, tau1=F.tau, rho=rho, m=m, n=n)
    plan.require("F", F.lam)
    for i, p in enumerate(ps):
        plan.require(f"P[{i}]", p.lam)
    tree = product_tree([p.coeffs for p in ps], plan.working_p)
    rems = remainder_tree(list(F.coeffs), tree)[:m]
    if debug.enabled():
        bound = F.tau + (rho + 1) * m * n + n + _lg(m * n)
        for r in rems:
            debug.check("modular", lg_max_abs(r), bound, ell)
    return [ApproxPoly(tuple(r), ell) for r in rems]
