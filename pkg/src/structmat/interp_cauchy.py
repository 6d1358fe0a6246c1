"""Lagrange interpolation, Cauchy matrix-vector products, Trummer's problem
and Cauchy linear systems, all built on subproduct and remainder trees.

Every division of two computed values goes through interval boxes whose
radii are the stage error bounds of the corresponding analysis, so a
quotient is only formed once its denominator is certified to be nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import gmpy2
from gmpy2 import mpfr, mpq

from . import debug
from .arith import (
    ComplexBox,
    box_mul,
    box_recip,
    eval_lower_bound,
    exact_distance,
    lg_max_abs,
    mag_exponent,
)
from .errors import CoincidentNodes
from .multipoint import NodeSet, _fan_in_check, eval_coeffs, rational_sum_coeffs
from .plan import lg, plan_precision
from .poly import ONE, ZERO, ApproxPoly, as_poly, derivative_coeffs, to_mpc, working


def node_separations(nodes) -> tuple[tuple, float, mpfr]:
    """``(deltas, lg prod deltas, min delta)`` for two or more distinct nodes."""
    ns = nodes if isinstance(nodes, NodeSet) else NodeSet(tuple(nodes))
    if ns.n < 2:
        raise ValueError("need at least two nodes")
    return ns.deltas, ns.lg_prod_delta, ns.min_delta


@dataclass(frozen=True)
class InterpProblem:
    x: NodeSet
    y: ApproxPoly

    def __post_init__(self):
        x = self.x if isinstance(self.x, NodeSet) else NodeSet(tuple(self.x))
        y = as_poly(self.y)
        if x.n != len(y):
            raise ValueError("knots and values differ in length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def tau2(self) -> int:
        return self.y.tau


@dataclass(frozen=True)
class CauchySpec:
    """Node pair defining ``C(s, t) = (1 / (s_i - t_j))``."""

    s: NodeSet
    t: NodeSet
    _row: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        s = self.s if isinstance(self.s, NodeSet) else NodeSet(tuple(self.s))
        t = self.t if isinstance(self.t, NodeSet) else NodeSet(tuple(self.t))
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        tq = [(mpq(z.real), mpq(z.imag)) for z in t.nodes]
        lam = min(s.lam, t.lam)
        thresh = mpq(0) if lam == math.inf else mpq(2) ** (2 * (2 - math.ceil(lam)))
        rows = []
        for z in s.nodes:
            a, b = mpq(z.real), mpq(z.imag)
            d2 = [(a - c) ** 2 + (b - e) ** 2 for c, e in tq]
            j = min(range(len(d2)), key=d2.__getitem__)
            if d2[j] <= thresh:
                raise CoincidentNodes("an s node coincides with a t node")
            rows.append(exact_distance(z, t.nodes[j]))
        object.__setattr__(self, "_row", tuple(rows))

    @property
    def row_deltas(self) -> tuple:
        """``Delta_j(s, t) = min_i |s_j - t_i|``."""
        return self._row

    @property
    def delta_st(self) -> mpfr:
        return min(self._row)

    @cached_property
    def lg_delta_st(self) -> float:
        return float(gmpy2.log2(self.delta_st))

    def swapped(self) -> "CauchySpec":
        return CauchySpec(self.t, self.s)


def _around(z, lg_radius: float, prec: int) -> ComplexBox:
    if lg_radius == -math.inf:
        return ComplexBox.point(z)
    with working(64):
        r = gmpy2.exp2(mpfr(lg_radius))
    return ComplexBox.around(z, r, prec)


def _quotient(num, lg_rad_num, den, lg_rad_den, prec):
    """Midpoint of the certified box ``[num] / [den]``."""
    q = box_mul(_around(num, lg_rad_num, prec), box_recip(_around(den, lg_rad_den, prec), prec), prec)
    return q.mid(prec)


# -- interpolation ---------------------------------------------------------------


def interp_plan(prob: InterpProblem, ell: int):
    x = prob.x
    return plan_precision("interp", ell, tau1=x.tau, tau2=prob.tau2, n=x.n,
                          lg_prod_delta=x.lg_prod_delta if x.n > 1 else 0.0)


def lagrange_interpolate(prob: InterpProblem, ell: int) -> ApproxPoly:
    """Coefficients of the polynomial of degree below ``n`` through ``(x_i, y_i)``."""
    x, y = prob.x, prob.y
    n = x.n
    if n > 1:
        x.deltas
    plan = interp_plan(prob, ell)
    plan.require("x", x.lam)
    plan.require("y", y.lam)
    lam, prec = plan.lam, plan.working_p
    tree = x.tree(prec)
    _fan_in_check(tree, x.tau, n, ell)
    dB = derivative_coeffs(list(tree.root), prec)
    vals = eval_coeffs(dB, x, prec)
    L = lg(n)
    lam1 = lam - ((4 * n - 4) * x.tau + 16 * n + L + 20)
    lam2 = lam1 - ((n * x.tau + n - L - 1) * L + 60 * n * (x.tau + 3) * L + 60 * L ** 3)
    lg_y = -y.lam
    c = [(_quotient(y[i], lg_y, vals[i], -lam2, prec),) for i in range(n)]
    tau_c = mag_exponent(ci[0] for ci in c)
    num = rational_sum_coeffs(c, tree, prec, (tau_c, x.tau, 1, ell))
    A = ApproxPoly(tuple(num), ell)
    return ApproxPoly.zero(ell) if A.is_zero else A


def vandermonde_solve(prob: InterpProblem, ell: int) -> ApproxPoly:
    return lagrange_interpolate(prob, ell)


# -- Cauchy products ----------------------------------------------------------------


def cauchy_plan(spec: CauchySpec, v: ApproxPoly, ell: int):
    s, t = spec.s, spec.t
    return plan_precision(
        "cauchy-mul", ell, tau1=s.tau, tau2=t.tau, tau3=v.tau, n=max(s.n, t.n),
        lg_delta_st=spec.lg_delta_st, lg_prod_delta_t=t.lg_prod_delta if t.n > 1 else 0.0,
    )


def _cauchy_apply(spec: CauchySpec, v: list, prec: int, lam: float, tau3: int, ell: float) -> list:
    """``C(s, t) v`` at ``prec`` bits for inputs accurate to ``2^-lam``."""
    s, t = spec.s, spec.t
    n = max(s.n, t.n)
    t_tree = t.tree(prec)
    P = rational_sum_coeffs([(c,) for c in v], t_tree, prec, (tau3, t.tau, 1, ell))
    Q = list(t_tree.root)
    Pv = eval_coeffs(P, s, prec)
    Qv = eval_coeffs(Q, s, prec)
    L = lg(n)
    lam1 = lam - (tau3 + (4 * n - 4) * t.tau + 32 * n)
    lam2 = lam1 - ((tau3 + (n - 1) * t.tau + 4 * n - L - 4) * L
                   + 60 * n * (s.tau + 3) * L + 60 * L ** 3)
    if debug.enabled() and t.n > 1:
        lgp = t.lg_prod_delta
        for i in range(s.n):
            bound = eval_lower_bound(Q, spec.row_deltas[i], lgp)
            if bound > 0:
                debug.check("evaluation-lower-bound", float(gmpy2.log2(bound)),
                            _lg_abs_lower(Qv[i], lam2))
    return [_quotient(Pv[i], -lam2, Qv[i], -lam2, prec) for i in range(s.n)]


def _lg_abs_lower(z, lam2) -> float:
    with gmpy2.context(precision=64, round=gmpy2.RoundDown):
        a = abs(z) - gmpy2.exp2(mpfr(-lam2))
        return float(gmpy2.log2(a)) if a > 0 else -math.inf


def cauchy_vec_mul(spec: CauchySpec, v, ell: int) -> list:
    """``sum_j v_j / (s_i - t_j)`` for every ``i``."""
    v = as_poly(v)
    if len(v) != spec.t.n:
        raise ValueError("dimension mismatch")
    plan = cauchy_plan(spec, v, ell)
    plan.require("s", spec.s.lam)
    plan.require("t", spec.t.lam)
    plan.require("v", v.lam)
    return _cauchy_apply(spec, list(v.coeffs), plan.working_p, plan.lam, v.tau, ell)


def trummer_plan(s: NodeSet, v: ApproxPoly, ell: int):
    return plan_precision("trummer", ell, tau1=s.tau, tau3=v.tau, n=s.n,
                          lg_prod_delta_s=s.lg_prod_delta if s.n > 1 else 0.0)


def trummer(s_nodes: NodeSet, v, ell: int) -> list:
    """``sum_{j != i} v_j / (s_i - s_j)`` for every ``i``."""
    s = s_nodes if isinstance(s_nodes, NodeSet) else NodeSet(tuple(s_nodes))
    v = as_poly(v)
    if len(v) != s.n:
        raise ValueError("dimension mismatch")
    if s.n > 1:
        s.deltas
    plan = trummer_plan(s, v, ell)
    plan.require("s", s.lam)
    plan.require("v", v.lam)
    lam, prec = plan.lam, plan.working_p
    n = s.n
    tree = s.tree(prec)
    P = rational_sum_coeffs([(c,) for c in v.coeffs], tree, prec, (v.tau, s.tau, 1, ell))
    Q = list(tree.root)
    dP = derivative_coeffs(P, prec)
    dQ = derivative_coeffs(Q, prec)
    ddQ = derivative_coeffs(dQ, prec)
    if debug.enabled():
        ln = math.log2(n) if n > 1 else 0.0
        debug.check("derivative", lg_max_abs(dP), lg_max_abs(P) + ln, ell)
        debug.check("derivative", lg_max_abs(ddQ), lg_max_abs(Q) + 2 * ln, ell)
    dPv = eval_coeffs(dP, s, prec)
    dQv = eval_coeffs(dQ, s, prec)
    ddQv = eval_coeffs(ddQ, s, prec)
    out = []
    with working(prec):
        for i in range(n):
            num = 2 * dPv[i] - v[i] * ddQv[i]
            den = 2 * dQv[i]
            lg_rad = _budget_radius(num, den, ell)
            out.append(_quotient(num, lg_rad, den, lg_rad, prec))
    return out


def _budget_radius(num, den, ell: int) -> float:
    """Input radius for which the quotient box stays within ``2^-ell``.

    From the interval width rules: with ``|num| <= 2^a``, ``2^-nu <= |den| <= 2^b``
    and both radii ``2^-r``, the quotient width is at most
    ``2^(a+4nu+2b+5-r) + 2^(nu+2-r)``.
    """
    ln = lg_max_abs([num])
    a = (max(0, math.ceil(ln)) if math.isfinite(ln) else 0) + 1
    b = max(0, math.ceil(lg_max_abs([den]))) + 1
    nu = max(0, math.ceil(-lg_max_abs([den]))) + 1
    return -(ell + 2 + max(a + 4 * nu + 2 * b + 5, nu + 2))


# -- Cauchy linear systems ------------------------------------------------------------


def cauchy_solve_plan(spec: CauchySpec, r: ApproxPoly, ell: int):
    s, t = spec.s, spec.t
    return plan_precision(
        "cauchy-solve", ell, tau1=s.tau, tau2=t.tau, tau3=r.tau, n=s.n,
        lg_prod_delta_s=s.lg_prod_delta if s.n > 1 else 0.0,
        lg_prod_delta_t=t.lg_prod_delta if t.n > 1 else 0.0,
        lg_delta_st=spec.lg_delta_st,
    )


def _lg_prod_except(ns: NodeSet) -> list:
    if ns.n == 1:
        return [0.0]
    lgs = [float(gmpy2.log2(d)) for d in ns.deltas]
    total = sum(lgs)
    return [total - g for g in lgs]


def cauchy_solve(spec: CauchySpec, r, ell: int) -> list:
    """Solve ``C(s, t) v = r`` through ``C(s,t)^-1 = D1 C(t,s) D2``."""
    s, t = spec.s, spec.t
    r = as_poly(r)
    if s.n != t.n:
        raise ValueError("Cauchy system must be square")
    if len(r) != s.n:
        raise ValueError("dimension mismatch")
    if s.n > 1:
        s.deltas
        t.deltas
    plan = cauchy_solve_plan(spec, r, ell)
    plan.require("s", s.lam)
    plan.require("t", t.lam)
    plan.require("r", r.lam)
    lam, prec = plan.lam, plan.working_p
    n = s.n
    L = lg(n)
    T12 = s.tau + t.tau
    ps, pt = list(s.tree(prec).root), list(t.tree(prec).root)
    ps_t = eval_coeffs(ps, t, prec)
    dpt_t = eval_coeffs(derivative_coeffs(pt, prec), t, prec)
    pt_s = eval_coeffs(pt, s, prec)
    dps_s = eval_coeffs(derivative_coeffs(ps, prec), s, prec)
    lg_rad = -lam + 300 * T12 * n * L
    d1 = [_quotient(ps_t[i], lg_rad, dpt_t[i], lg_rad, prec) for i in range(n)]
    d2 = [_quotient(pt_s[i], lg_rad, dps_s[i], lg_rad, prec) for i in range(n)]
    ex_s, ex_t = _lg_prod_except(s), _lg_prod_except(t)
    lg_r = -r.lam
    r1 = []
    for i in range(n):
        rad_d2 = -lam + 315 * T12 * n * L - 4 * ex_s[i]
        b = box_mul(_around(d2[i], rad_d2, prec), _around(r[i], lg_r, prec), prec)
        r1.append(b.mid(prec))
    lam_r1 = lam - (316 * T12 * n * L + r.tau - 4 * min(ex_s))
    tau_r1 = max(1, math.ceil(7 * n * T12 + r.tau - min(ex_s)))
    r2 = _cauchy_apply(spec.swapped(), r1, prec, lam_r1, tau_r1, ell)
    lps = s.lg_prod_delta if n > 1 else 0.0
    lpt = t.lg_prod_delta if n > 1 else 0.0
    rad_r2 = (-lam + 616 * T12 * n * L + 31 * r.tau * L - 35
              - 34 * L * lps - 4 * lpt - 24 * spec.lg_delta_st)
    v = []
    for i in range(n):
        rad_d1 = -lam + 315 * T12 * n * L - 4 * ex_t[i]
        b = box_mul(_around(d1[i], rad_d1, prec), _around(r2[i], rad_r2, prec), prec)
        v.append(b.mid(prec))
    return v
