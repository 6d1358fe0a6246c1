"""Random dyadic instances, oracle comparisons and input perturbation.

A :class:`Task` bundles an instance generator, the fast operation, its
precision plan and an exact reference. ``verify`` in the CLI and the test
suite both drive tasks through :func:`run_trials`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

import gmpy2
from gmpy2 import mpc, mpfr

from . import oracle
from .arith import mag_exponent, root_magnitude_bounds, to_mpc, working
from .errors import BoundViolation, InsufficientInputAccuracy
from .interp_cauchy import (CauchySpec, InterpProblem, cauchy_plan, cauchy_solve,
                            cauchy_solve_plan, cauchy_vec_mul, interp_plan,
                            lagrange_interpolate, trummer, trummer_plan)
from .multipoint import (NodeSet, build_tree, modular_reduce_many, mul_many,
                         multipoint_eval, multipoint_plan, sum_rational,
                         vandermonde_vec_mul)
from .plan import PrecisionPlan, plan_precision
from .poly import ApproxPoly, fft_eval_unity, poly_mul, poly_square_times
from .toeplitz import (HankelMatrix, ToeplitzMatrix, TriToeplitz, hankel_vec_mul,
                       poly_divide, toeplitz_vec_mul, tri_toeplitz_inverse)


# -- random dyadic data ------------------------------------------------------------


def rand_dyadic(rng: random.Random, tau: int, bits: int = 24, real: bool = False) -> mpc:
    """Random value with both parts in ``[-2^(tau-1), 2^(tau-1))`` on a ``bits``-bit grid."""
    scale = tau - 1 - bits
    with working(bits + 1):
        re = gmpy2.mul_2exp(mpfr(rng.randrange(-(1 << bits), 1 << bits)), scale)
        im = 0 if real else gmpy2.mul_2exp(mpfr(rng.randrange(-(1 << bits), 1 << bits)), scale)
        return mpc(re, im)


def rand_vec(rng, n, tau, bits=24) -> list:
    return [rand_dyadic(rng, tau, bits) for _ in range(n)]


def rand_nodes(rng, n, tau=1, bits=6) -> list:
    """``n`` distinct nodes on a coarse grid, so separations stay moderate."""
    seen, out = set(), []
    while len(out) < n:
        z = rand_dyadic(rng, tau, bits)
        key = (z.real, z.imag)
        if key not in seen:
            seen.add(key)
            out.append(z)
    return out


def exact_to_mpc(z) -> mpc:
    """Lossless conversion of a dyadic ``ExactComplex``."""
    z = oracle.ExactComplex.of(z)
    return to_mpc((z.re, z.im))


def perturb(values, lam: int, rng: random.Random) -> list:
    """Shift every entry by exactly ``2^-lam`` along a random unit direction in ``{+-1, +-i}``."""
    step = gmpy2.mpq(1, 1 << lam) if lam >= 0 else gmpy2.mpq(1 << -lam)
    dirs = [oracle.ExactComplex(step), oracle.ExactComplex(-step),
            oracle.ExactComplex(0, step), oracle.ExactComplex(0, -step)]
    return [exact_to_mpc(oracle.ExactComplex.of(v) + rng.choice(dirs)) for v in values]


def digest(fields: dict) -> str:
    import hashlib
    h = hashlib.sha256()
    for k in sorted(fields):
        for v in fields[k]:
            h.update(f"{k}:{v.real.digits(16)}:{v.imag.digits(16)};".encode())
    return h.hexdigest()[:16]


# -- tasks ------------------------------------------------------------------------


@dataclass
class Instance:
    fields: dict
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Task:
    name: str
    gen: Callable[[random.Random, int, int], Instance]
    plan: Callable[[Instance, int, bool], PrecisionPlan]
    run: Callable[[Instance, int, dict, bool], list]
    truth: Callable[[Instance], list]
    lams: Callable[[Instance, int, bool], dict] | None = None

    def field_lams(self, inst: Instance, ell: int, strict: bool = False) -> dict:
        if self.lams is not None:
            return self.lams(inst, ell, strict)
        lam = self.plan(inst, ell, strict).lam
        return {k: lam for k in inst.fields}


def _L(lams, key):
    return math.inf if lams is None else lams[key]


def _poly(inst, key, lams):
    return ApproxPoly(tuple(inst.fields[key]), _L(lams, key))


def _nodes(inst, key, lams):
    return NodeSet(tuple(inst.fields[key]), _L(lams, key))


# fft


def _gen_fft(rng, n, tau):
    return Instance({"A": rand_vec(rng, n, tau)}, {"k": max(1, (n - 1).bit_length())})


def _plan_fft(inst, ell, strict):
    A = ApproxPoly(tuple(inst.fields["A"]))
    return plan_precision("fft", ell, tau=A.tau, K=1 << inst.meta["k"])


def _truth_fft(inst):
    K = 1 << inst.meta["k"]
    prec = 4 * _plan_fft(inst, 96, False).working_p + 64
    out = []
    with working(prec):
        for i in range(K):
            a = 2 * gmpy2.const_pi() * i / K
            out.append(oracle.horner_mp(inst.fields["A"], mpc(gmpy2.cos(a), gmpy2.sin(a)), prec))
    return out


FFT = Task("fft", _gen_fft, _plan_fft,
           lambda inst, ell, lams, strict: fft_eval_unity(_poly(inst, "A", lams), inst.meta["k"], ell),
           _truth_fft)


# products


def _gen_two(rng, n, tau):
    return Instance({"A": rand_vec(rng, n, tau), "B": rand_vec(rng, n, tau)})


def _plan_mul(inst, ell, strict):
    A, B = _poly(inst, "A", None), _poly(inst, "B", None)
    return plan_precision("mul", ell, strict, tau1=A.tau, tau2=B.tau,
                          d=max(A.degree, B.degree, 1))


MUL = Task("mul", _gen_two, _plan_mul,
           lambda inst, ell, lams, strict: list(
               poly_mul(_poly(inst, "A", lams), _poly(inst, "B", lams), ell, strict).coeffs),
           lambda inst: oracle.exact_convolution(inst.fields["A"], inst.fields["B"]))


def _plan_p02p1(inst, ell, strict):
    A, B = _poly(inst, "A", None), _poly(inst, "B", None)
    return plan_precision("p02p1", ell, tau0=A.tau, tau1=B.tau, d=max(A.degree, B.degree, 1))


P02P1 = Task("p02p1", _gen_two, _plan_p02p1,
             lambda inst, ell, lams, strict: list(poly_square_times(
                 _poly(inst, "A", lams), _poly(inst, "B", lams), ell).coeffs),
             lambda inst: oracle.exact_convolution(
                 oracle.exact_convolution(inst.fields["A"], inst.fields["A"]), inst.fields["B"]))


# triangular Toeplitz inverse and division


# the unit diagonal is structural; field "c" holds the subdiagonal entries


def _gen_tinv(rng, n, tau):
    return Instance({"c": rand_vec(rng, n, tau)})


def _tinv_col(inst):
    return [mpc(1, precision=(2, 2))] + list(inst.fields["c"])


def _plan_tinv(inst, ell, strict):
    col = _tinv_col(inst)
    rho = root_magnitude_bounds(list(reversed(col))).rho
    return plan_precision("tinv", ell, tau=mag_exponent(col[1:]), rho=rho, n=len(col) - 1)


def _run_tinv(inst, ell, lams, strict):
    T = TriToeplitz(tuple(_tinv_col(inst)), _L(lams, "c"))
    return list(tri_toeplitz_inverse(T, ell).first_col)


def _truth_tinv(inst):
    col = _tinv_col(inst)
    return oracle.exact_series_inverse(col, len(col))


TINV = Task("tinv", _gen_tinv, _plan_tinv, _run_tinv, _truth_tinv)


def _gen_div(rng, n, tau):
    k = max(1, n // 2)
    t = rand_vec(rng, k, 1) + [mpc(1, precision=(2, 2))]
    s = rand_vec(rng, n + k, tau)
    return Instance({"s": s, "t": t})


def _div_rho(inst):
    return max(0, root_magnitude_bounds(inst.fields["t"]).rho)


def _plan_div(inst, ell, strict):
    s, t = _poly(inst, "s", None), _poly(inst, "t", None)
    m, n = s.degree, t.degree
    return plan_precision("div", ell, strict, tau1=s.tau, tau2=t.tau, rho=_div_rho(inst),
                          n=max(n, m - n, 1))


def _run_div(inst, ell, lams, strict):
    res = poly_divide(_poly(inst, "s", lams), _poly(inst, "t", lams), ell, _div_rho(inst), strict)
    return list(res.q.coeffs) + list(res.r.coeffs)


def _truth_div(inst):
    q, r = oracle.exact_divide(inst.fields["s"], inst.fields["t"])
    n = len(inst.fields["t"]) - 1
    return q + r + [oracle.ZERO] * (n - len(r))


DIV = Task("div", _gen_div, _plan_div, _run_div, _truth_div)


# subproduct trees and multipoint evaluation


def _gen_nodes(rng, n, tau):
    return Instance({"x": rand_nodes(rng, n)})


def _plan_fan_in(inst, ell, strict):
    ns = _nodes(inst, "x", None)
    return plan_precision("fan-in", ell, tau=ns.tau, n=ns.n)


def _truth_fan_in(inst):
    out = [oracle.ONE]
    for x in inst.fields["x"]:
        out = oracle.exact_convolution(out, [-oracle.exact(x), oracle.ONE])
    return out


FAN_IN = Task("fan-in", _gen_nodes, _plan_fan_in,
              lambda inst, ell, lams, strict: list(build_tree(_nodes(inst, "x", lams), ell).root),
              _truth_fan_in)


def _gen_multipoint(rng, n, tau):
    return Instance({"p": rand_vec(rng, n, tau), "x": rand_nodes(rng, n)})


def _plan_multipoint(inst, ell, strict):
    return multipoint_plan(_poly(inst, "p", None), _nodes(inst, "x", None), ell)


def _lams_multipoint(inst, ell, strict):
    out, tin = _plan_multipoint(inst, ell, strict).parts
    return {"p": out.lam, "x": tin.lam}


MULTIPOINT = Task(
    "multipoint", _gen_multipoint, _plan_multipoint,
    lambda inst, ell, lams, strict: multipoint_eval(_poly(inst, "p", lams), _nodes(inst, "x", lams), ell),
    lambda inst: [oracle.horner_eval(inst.fields["p"], x) for x in inst.fields["x"]],
    lams=_lams_multipoint)

VANDERMONDE = Task(
    "vandermonde", _gen_multipoint, _plan_multipoint,
    lambda inst, ell, lams, strict: vandermonde_vec_mul(_nodes(inst, "x", lams), _poly(inst, "p", lams), ell),
    lambda inst: oracle.naive_structured_mul("vandermonde", inst.fields["x"], inst.fields["p"]),
    lams=_lams_multipoint)


def _gen_many(rng, n, tau):
    m = max(1, n)
    deg = 2
    return Instance({f"P{i}": rand_vec(rng, deg + 1, tau) for i in range(m)}, {"m": m})


def _plan_many(inst, ell, strict):
    ps = [ApproxPoly(tuple(v)) for v in inst.fields.values()]
    return plan_precision("mul-many", ell, tau=max(p.tau for p in ps), m=len(ps),
                          n=max(max(p.degree for p in ps), 1))


def _truth_many(inst):
    out = [oracle.ONE]
    for i in range(inst.meta["m"]):
        out = oracle.exact_convolution(out, inst.fields[f"P{i}"])
    return out


MUL_MANY = Task(
    "mul-many", _gen_many, _plan_many,
    lambda inst, ell, lams, strict: list(mul_many(
        [_poly(inst, f"P{i}", lams) for i in range(inst.meta["m"])], ell).coeffs),
    _truth_many)


def _gen_ratsum(rng, n, tau):
    m = max(1, n)
    f = {}
    for i in range(m):
        f[f"Q{i}"] = rand_vec(rng, 2, tau)
        f[f"P{i}"] = rand_vec(rng, 2, tau) + [mpc(1, precision=(2, 2))]
    return Instance(f, {"m": m})


def _plan_ratsum(inst, ell, strict):
    m = inst.meta["m"]
    qs = [ApproxPoly(tuple(inst.fields[f"Q{i}"])) for i in range(m)]
    ps = [ApproxPoly(tuple(inst.fields[f"P{i}"])) for i in range(m)]
    return plan_precision("rat-sum", ell, tau1=max(q.tau for q in qs), tau2=max(p.tau for p in ps),
                          m=m, n=max(max(p.degree for p in ps), 1))


def _run_ratsum(inst, ell, lams, strict):
    m = inst.meta["m"]
    num, den = sum_rational([(_poly(inst, f"Q{i}", lams), _poly(inst, f"P{i}", lams))
                             for i in range(m)], ell)
    d = 3 * m - 1
    return _pad(list(num.coeffs), d) + _pad(list(den.coeffs), d + 1)


def _pad(v, k):
    return v + [mpc(0)] * (k - len(v))


def _truth_ratsum(inst):
    m = inst.meta["m"]
    P = [inst.fields[f"P{i}"] for i in range(m)]
    Q = [inst.fields[f"Q{i}"] for i in range(m)]
    den = [oracle.ONE]
    for p in P:
        den = oracle.exact_convolution(den, p)
    num = []
    for j in range(m):
        term = oracle.exact_vec(Q[j])
        for k in range(m):
            if k != j:
                term = oracle.exact_convolution(term, P[k])
        num = [a + b for a, b in zip(_pad_e(num, len(term)), _pad_e(term, len(num)))]
    d = 3 * m - 1
    return _pad_e(num, d) + _pad_e(den, d + 1)


def _pad_e(v, k):
    return list(v) + [oracle.ZERO] * (k - len(v))


RAT_SUM = Task("rat-sum", _gen_ratsum, _plan_ratsum, _run_ratsum, _truth_ratsum)


def _gen_mod(rng, n, tau):
    m = max(1, n)
    f = {"F": rand_vec(rng, 2 * m + 1, tau)}
    for i in range(m):
        f[f"P{i}"] = rand_vec(rng, 2, 1) + [mpc(1, precision=(2, 2))]
    return Instance(f, {"m": m})


def _mod_rho(inst):
    m = inst.meta["m"]
    return max(0, max(root_magnitude_bounds(inst.fields[f"P{i}"]).rho for i in range(m)))


def _plan_mod(inst, ell, strict):
    m = inst.meta["m"]
    F = ApproxPoly(tuple(inst.fields["F"]))
    return plan_precision("mod", ell, tau1=F.tau, rho=_mod_rho(inst), m=m, n=2)


def _run_mod(inst, ell, lams, strict):
    m = inst.meta["m"]
    rems = modular_reduce_many(_poly(inst, "F", lams),
                               [_poly(inst, f"P{i}", lams) for i in range(m)], ell)
    return [c for r in rems for c in _pad(list(r.coeffs), 2)]


def _truth_mod(inst):
    out = []
    for i in range(inst.meta["m"]):
        _, r = oracle.exact_divide(inst.fields["F"], inst.fields[f"P{i}"])
        out.extend(_pad_e(r, 2))
    return out


MOD = Task("mod", _gen_mod, _plan_mod, _run_mod, _truth_mod)


# interpolation and Cauchy


def _gen_interp(rng, n, tau):
    x = rand_nodes(rng, n)
    A = rand_vec(rng, n, tau, bits=16)
    y = [exact_to_mpc(oracle.horner_eval(A, xi)) for xi in x]
    return Instance({"x": x, "y": y}, {"A": A})


def _interp_problem(inst, lams):
    return InterpProblem(_nodes(inst, "x", lams), _poly(inst, "y", lams))


INTERP = Task(
    "interp", _gen_interp, lambda inst, ell, strict: interp_plan(_interp_problem(inst, None), ell),
    lambda inst, ell, lams, strict: _pad(list(lagrange_interpolate(_interp_problem(inst, lams), ell).coeffs),
                                         len(inst.fields["x"])),
    lambda inst: oracle.exact_vec(inst.meta["A"]))


def _gen_toeplitz(rng, n, tau):
    return Instance({"u": rand_vec(rng, 2 * n - 1, tau), "v": rand_vec(rng, n, tau)})


def _toeplitz(inst, lams):
    u, n = inst.fields["u"], len(inst.fields["v"])
    col = tuple(u[n - 1:])
    row = tuple(reversed(u[: n]))
    return ToeplitzMatrix(col, row, _L(lams, "u"))


def _plan_struct(inst, ell, strict):
    u = ApproxPoly(tuple(inst.fields["u"]))
    v = ApproxPoly(tuple(inst.fields["v"]))
    return plan_precision("mul", ell, tau1=u.tau, tau2=v.tau, d=max(u.degree, 1))


TOEPLITZ = Task(
    "toeplitz", _gen_toeplitz, _plan_struct,
    lambda inst, ell, lams, strict: toeplitz_vec_mul(_toeplitz(inst, lams), _poly(inst, "v", lams), ell),
    lambda inst: oracle.naive_structured_mul(
        "toeplitz", (_toeplitz(inst, None).first_col, _toeplitz(inst, None).first_row), inst.fields["v"]))

HANKEL = Task(
    "hankel", _gen_toeplitz, _plan_struct,
    lambda inst, ell, lams, strict: hankel_vec_mul(
        HankelMatrix(tuple(inst.fields["u"]), _L(lams, "u")), _poly(inst, "v", lams), ell),
    lambda inst: oracle.naive_structured_mul("hankel", inst.fields["u"], inst.fields["v"]))


def _gen_cauchy(rng, n, tau):
    pts = rand_nodes(rng, 2 * n)
    return Instance({"s": pts[:n], "t": pts[n:], "v": rand_vec(rng, n, tau)})


def _spec(inst, lams):
    return CauchySpec(_nodes(inst, "s", lams), _nodes(inst, "t", lams))


CAUCHY = Task(
    "cauchy", _gen_cauchy,
    lambda inst, ell, strict: cauchy_plan(_spec(inst, None), _poly(inst, "v", None), ell),
    lambda inst, ell, lams, strict: cauchy_vec_mul(_spec(inst, lams), _poly(inst, "v", lams), ell),
    lambda inst: oracle.naive_structured_mul("cauchy", (inst.fields["s"], inst.fields["t"]),
                                             inst.fields["v"]))


def _gen_trummer(rng, n, tau):
    return Instance({"s": rand_nodes(rng, n), "v": rand_vec(rng, n, tau)})


TRUMMER = Task(
    "trummer", _gen_trummer,
    lambda inst, ell, strict: trummer_plan(_nodes(inst, "s", None), _poly(inst, "v", None), ell),
    lambda inst, ell, lams, strict: trummer(_nodes(inst, "s", lams), _poly(inst, "v", lams), ell),
    lambda inst: oracle.naive_structured_mul("trummer", inst.fields["s"], inst.fields["v"]))


def _gen_solve(rng, n, tau):
    pts = rand_nodes(rng, 2 * n)
    return Instance({"s": pts[:n], "t": pts[n:], "r": rand_vec(rng, n, tau)})


CAUCHY_SOLVE = Task(
    "cauchy-solve", _gen_solve,
    lambda inst, ell, strict: cauchy_solve_plan(_spec(inst, None), _poly(inst, "r", None), ell),
    lambda inst, ell, lams, strict: cauchy_solve(_spec(inst, lams), _poly(inst, "r", lams), ell),
    lambda inst: oracle.exact_gauss_solve(
        oracle.cauchy_matrix(inst.fields["s"], inst.fields["t"]), inst.fields["r"]))


TASKS: dict[str, Task] = {t.name: t for t in (
    FFT, MUL, P02P1, TINV, DIV, FAN_IN, MULTIPOINT, VANDERMONDE, MUL_MANY, RAT_SUM, MOD,
    INTERP, TOEPLITZ, HANKEL, CAUCHY, TRUMMER, CAUCHY_SOLVE)}

# plan formula exercised by each task
FORMULA_TASK = {
    "fft": "fft", "mul": "mul", "mul-strict": "mul", "p02p1": "p02p1", "tinv": "tinv",
    "div": "div", "div-strict": "div", "fan-in": "fan-in", "fan-out": "multipoint",
    "mul-many": "mul-many", "rat-sum": "rat-sum", "mod": "mod", "interp": "interp",
    "cauchy-mul": "cauchy", "trummer": "trummer", "cauchy-solve": "cauchy-solve",
}


# -- drivers ------------------------------------------------------------------------


@dataclass
class TrialResult:
    index: int
    n: int
    ell: int
    lg_err: float
    ok: bool
    digest: str
    lam: int | None = None
    note: str = ""


def check_trial(task: Task, inst: Instance, ell: int, strict: bool = False,
                lams: dict | None = None, run_inst: Instance | None = None) -> tuple[float, bool]:
    out = task.run(run_inst or inst, ell, lams, strict)
    truth = task.truth(inst)
    return oracle.lg_error(out, truth), oracle.within(out, truth, ell)


def perturbed_trial(task: Task, inst: Instance, ell: int, rng: random.Random,
                    strict: bool = False, tries: int = 4) -> tuple[float, bool, int]:
    """Run ``task`` on inputs shifted by exactly the planned ``2^-lam``.

    The plan is recomputed on the shifted data; when a magnitude crosses a
    power of two the required accuracy can rise, and the shift is redrawn at
    the new accuracy.
    """
    lams = task.field_lams(inst, ell, strict)
    for _ in range(tries):
        fields = {k: perturb(v, lams[k], rng) for k, v in inst.fields.items()}
        shifted = Instance(fields, inst.meta)
        try:
            err, ok = check_trial(task, inst, ell, strict, lams, shifted)
            return err, ok, max(lams.values())
        except InsufficientInputAccuracy:
            need = task.field_lams(shifted, ell, strict)
            lams = {k: max(lams[k], need[k]) for k in lams}
    raise RuntimeError(f"{task.name}: plan did not stabilise under perturbation")


def run_trials(task: Task, trials: int, seed: int, n_max: int, tau: int,
               ells=(32, 64, 96), strict: bool = False, perturbed: bool = False,
               n_min: int = 1) -> list[TrialResult]:
    rng = random.Random(seed)
    out = []
    for i in range(trials):
        n = rng.randint(n_min, n_max)
        t = rng.randint(1, tau)
        ell = ells[i % len(ells)]
        inst = task.gen(rng, n, t)
        d = digest(inst.fields)
        try:
            if perturbed:
                err, ok, lam = perturbed_trial(task, inst, ell, rng, strict)
            else:
                (err, ok), lam = check_trial(task, inst, ell, strict), None
        except BoundViolation as e:
            # recorded as a failed trial so one violation does not hide the rest
            out.append(TrialResult(i, n, ell, math.nan, False, d, None, str(e)))
            continue
        out.append(TrialResult(i, n, ell, err, ok, d, lam))
    return out
