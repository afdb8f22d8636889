from fractions import Fraction

import pytest

from hyperderiv import CommPoly, apply_hyper, format_commpoly, hyper_vars, parse
from hyperderiv.qderiv import derivative_hyper
from hyperderiv.series import ScalarSeries


def _ring(*names):
    return tuple(names)


def test_arithmetic_and_equality():
    v = _ring("x", "y")
    x, y = CommPoly.variable(v, "x"), CommPoly.variable(v, "y")
    p = (x + y) ** 2
    assert p == x * x + 2 * x * y + y * y
    assert (p - p).is_zero()
    assert x * y == y * x


def test_integrate_rational_upper_bound():
    v = _ring("t",)
    t = CommPoly.variable(v, "t")
    # int_0^1 t^3 = 1/4
    assert (t ** 3).integrate("t", Fraction(1)).constant_value() == Fraction(1, 4)
    # int_0^{1/2} (1 - t) = 3/8
    got = (1 - t).integrate("t", Fraction(1, 2)).constant_value()
    assert got == Fraction(3, 8)


def test_integrate_symbolic_upper_bound_simplex():
    v = _ring("t1", "t2")
    t2 = CommPoly.variable(v, "t2")
    inner = (t2 ** 2).integrate("t2", "t1")           # t1^3/3
    total = inner.integrate("t1", Fraction(1))        # 1/12
    assert total.constant_value() == Fraction(1, 12)


def test_constant_value_requires_constant():
    v = _ring("x",)
    with pytest.raises(ValueError):
        CommPoly.variable(v, "x").constant_value()


def test_rename_onto_superset():
    v = _ring("a", "t")
    a = CommPoly.variable(v, "a")
    p = (a ** 2 * 3).rename_onto(("a", "b"))
    assert p.vars == ("a", "b")
    assert p.degree_in("a") == 2
    t = CommPoly.variable(v, "t")
    with pytest.raises(ValueError):
        (a * t).rename_onto(("a",))


def test_subs_partial_evaluation():
    v = _ring("x", "y")
    x, y = CommPoly.variable(v, "x"), CommPoly.variable(v, "y")
    p = x ** 2 * y + 2 * y
    q = p.subs({"x": Fraction(3)})
    assert q == y * 11


def test_pretty_matches_derivative_examples():
    assert derivative_hyper(ScalarSeries.monomial(2), 1).pretty() == "2*Â - δ̂1"
    assert derivative_hyper(ScalarSeries.monomial(3), 1).pretty() == "3*Â^2 - 3*Â*δ̂1 + δ̂1^2"
    assert derivative_hyper(ScalarSeries.monomial(2), 2).pretty() == "2"


def test_to_hyper_monomial_mapping():
    chp = derivative_hyper(ScalarSeries.monomial(2), 1)
    h = chp.to_hyper("A")
    assert apply_hyper(h, ["dA"], base="A") == parse("A*dA + dA*A")


def test_hyper_vars_naming():
    assert hyper_vars(2) == ("Â", "δ̂1", "δ̂2")
    assert format_commpoly(CommPoly(hyper_vars(0))) == "0"
