"""Working-precision plans.

Each formula maps a target output accuracy ``ell`` (absolute error at most
``2^-ell``) and the instance parameters to the input accuracy ``lam`` an
operation requires. Arithmetic then runs at ``lam + GUARD_BITS`` bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import InsufficientInputAccuracy, UnknownFormula

GUARD_BITS = 32


def lg(n: float) -> int:
    """Bit count of a size parameter: ``max(1, ceil(log2 n))``."""
    if n <= 2:
        return 1
    return max(1, math.ceil(math.log2(n)))


@dataclass(frozen=True)
class PrecisionPlan:
    ell: int
    lam: int
    working_p: int
    formula: str
    params: dict = field(default_factory=dict, compare=False)
    parts: tuple = ()

    def require(self, name: str, declared: float, lam: int | None = None) -> None:
        need = self.lam if lam is None else lam
        if declared < need:
            raise InsufficientInputAccuracy(name, need, declared)


def _fft(ell, tau, K):
    return ell + tau + lg(K) + 3


def _mul(ell, tau1, tau2, d):
    return ell + 2 * tau1 + 2 * tau2 + 6 * lg(d) + 15


def _mul_strict(ell, tau1, tau2, d):
    K = 1 << lg(2 * d + 1)
    return ell + 2 * tau1 + 2 * tau2 + 5.1 * lg(K) + 4


def _p02p1(ell, tau0, tau1, d):
    return ell + 8 * tau0 + 2 * tau1 + 15 * lg(d) + 40


def _tinv(ell, tau, rho, n):
    L = lg(n)
    return ell + 10 * tau * L + 70 * L * L + 8 * (rho + 1) * n * L


def _div(ell, tau1, rho, n, tau2=0):
    return ell + tau1 + 150 * (rho + 1) * n * lg(n)


def _div_strict(ell, tau1, tau2, rho, n):
    L = lg(n)
    return ell + tau1 + 12 * tau2 * L + 80 * L * L + 10 * (rho + 1) * n * L + 30


def _fan_in(ell, tau, n):
    v = ell + (4 * n - 4) * tau + 32 * n - (lg(n) + 5) ** 2 - 7
    return max(v, ell + 1)


def _fan_out(ell, tau1, rho, n):
    return ell + 2 * tau1 * lg(n) + 300 * (rho + 1) * n * lg(n)


def _mul_many(ell, tau, m, n):
    return ell + (4 * m - 4) * tau + (4 * m + 2 * lg(m) - 4) * lg(n) + 32 * m


def _rat_sum(ell, tau1, tau2, m, n):
    return ell + tau1 + (4 * m - 4) * tau2 + (5 * m + 2 * lg(m) - 4) * lg(n) + 32 * m


def _mod(ell, tau1, rho, m, n):
    return (ell + tau1 * lg(m) + 60 * n * m * (rho + 3) * lg(m * n)
            + 60 * lg(m) * lg(m + n) ** 2)


def _interp(ell, tau1, tau2, n, lg_prod_delta):
    L = lg(n)
    return (ell + 68 * n * (tau1 + 3) * L + 4 * n * tau2 - 6 * lg_prod_delta
            + 50 * n + 60 * L ** 3 + 20)


def _cauchy_mul(ell, tau1, tau2, tau3, n, lg_delta_st, lg_prod_delta_t):
    L = lg(n)
    return (ell + 90 * n * (tau1 + 3) * L + 32 * (n - 1) * tau2 * L + 30 * tau3 * L
            - 35 - 24 * lg_delta_st - 4 * lg_prod_delta_t)


def _trummer(ell, tau1, tau3, n, lg_prod_delta_s):
    L = lg(n)
    return ell + 70 * (tau1 + 3) * n * L + 4 * tau3 * L - 4 * lg_prod_delta_s


def _cauchy_solve(ell, tau1, tau2, tau3, n, lg_prod_delta_s, lg_prod_delta_t, lg_delta_st):
    L = lg(n)
    return (ell + 630 * (tau1 + tau2) * n * L + 32 * tau3 * L - 35
            - 35 * L * lg_prod_delta_s - 5 * lg_prod_delta_t - 25 * lg_delta_st)


FORMULAS: dict[str, Callable[..., float]] = {
    "fft": _fft,
    "mul": _mul,
    "mul-strict": _mul_strict,
    "p02p1": _p02p1,
    "tinv": _tinv,
    "div": _div,
    "div-strict": _div_strict,
    "fan-in": _fan_in,
    "fan-out": _fan_out,
    "mul-many": _mul_many,
    "rat-sum": _rat_sum,
    "mod": _mod,
    "interp": _interp,
    "cauchy-mul": _cauchy_mul,
    "trummer": _trummer,
    "cauchy-solve": _cauchy_solve,
}

_STRICT = {"mul": "mul-strict", "div": "div-strict"}


def plan_precision(formula: str, ell: int, strict: bool = False, **params) -> PrecisionPlan:
    """Input accuracy and working precision for ``formula`` at output accuracy ``ell``.

    Root-bound exponents ``rho`` are clamped at zero. ``strict`` selects the
    tighter formula where one exists (``mul`` and ``div``).
    """
    name = _STRICT.get(formula, formula) if strict else formula
    fn = FORMULAS.get(name)
    if fn is None:
        raise UnknownFormula(formula)
    args = dict(params)
    if "rho" in args:
        args["rho"] = max(0, args["rho"])
    if name == "div-strict":
        args.setdefault("tau2", 1)
    if name == "div":
        args.pop("tau2", None)
    value = fn(ell, **args)
    lam = max(ell, math.ceil(value))
    return PrecisionPlan(ell, lam, lam + GUARD_BITS, name, dict(params))
