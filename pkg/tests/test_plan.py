import inspect

import pytest

from structmat.errors import InsufficientInputAccuracy, UnknownFormula
from structmat.plan import FORMULAS, lg, plan_precision


def test_mul_simplified():
    plan = plan_precision("mul", 50, tau1=0, tau2=0, d=7)
    assert plan.lam == 83
    assert plan.working_p == plan.lam + 32


def test_fan_out():
    assert plan_precision("fan-out", 40, tau1=0, rho=0, n=8).lam == 7240


def test_zero_ell_is_the_constant_overhead():
    assert plan_precision("mul", 0, tau1=0, tau2=0, d=1).lam == 6 + 15


def test_strict_forms():
    simple = plan_precision("mul", 64, tau1=3, tau2=3, d=100)
    strict = plan_precision("mul", 64, strict=True, tau1=3, tau2=3, d=100)
    assert strict.formula == "mul-strict"
    assert strict.lam <= simple.lam


def test_negative_rho_is_clamped():
    a = plan_precision("tinv", 32, tau=2, rho=-5, n=16)
    b = plan_precision("tinv", 32, tau=2, rho=0, n=16)
    assert a.lam == b.lam


def test_unknown_formula():
    with pytest.raises(UnknownFormula):
        plan_precision("no-such-formula", 10)


def test_require():
    plan = plan_precision("mul", 50, tau1=0, tau2=0, d=7)
    plan.require("A", 83)
    plan.require("A", float("inf"))
    with pytest.raises(InsufficientInputAccuracy) as e:
        plan.require("A", 82)
    assert e.value.required == 83


def test_lg():
    assert [lg(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]


@pytest.mark.parametrize("name", sorted(FORMULAS))
def test_lambda_never_below_ell(name):
    params = {"tau": 1, "tau0": 1, "tau1": 1, "tau2": 1, "tau3": 1, "rho": 1, "n": 4, "m": 4,
              "d": 4, "K": 8, "lg_prod_delta": -3, "lg_delta_st": -2, "lg_prod_delta_s": -3,
              "lg_prod_delta_t": -3}
    wanted = inspect.signature(FORMULAS[name]).parameters
    plan = plan_precision(name, 20, **{k: v for k, v in params.items() if k in wanted})
    assert plan.lam >= 20
