import random
from fractions import Fraction

import pytest

from hyperderiv import (
    NcPoly,
    ScalarSeries,
    apply_hyper,
    as_poly,
    d_arrow,
    delta_arrow,
    flatten,
    inner_derivation,
    parse,
)
from hyperderiv.hyperops import Delta, LeftMul
from hyperderiv.qderiv import (
    ParamPoly,
    derivative_hyper,
    differential,
    multivariate_taylor,
    nth_differential,
    partial_derivative,
    shift,
    substitute_shifts,
    taylor,
)

A, B, dA = "A", "B", "dA"


def _mono(p):
    return ScalarSeries.monomial(p)


def _rand_series(rng, deg):
    return ScalarSeries([Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(deg + 1)])


def test_differential_examples():
    assert differential(_mono(2), A, dA) == parse("A*dA + dA*A")
    assert differential(_mono(1), A, dA) == parse("dA")
    assert differential(_mono(3), A, dA) == parse("A*A*dA + A*dA*A + dA*A*A")


def test_nth_differential_examples():
    got = nth_differential(_mono(3), 2, A, dA)
    assert got == parse("2*A*dA*dA + 2*dA*A*dA + 2*dA*dA*A")
    assert nth_differential(_mono(2), 3, A, dA).is_zero()
    assert nth_differential(_mono(1), 1, A, dA) == differential(_mono(1), A, dA)
    with pytest.raises(ValueError):
        nth_differential(_mono(2), 0, A, dA)


def test_nth_differential_agrees_with_iterated_derivation():
    rng = random.Random(3)
    for _ in range(10):
        f = _rand_series(rng, 6)
        p = f.at_poly(A)
        for n in range(1, 4):
            p = d_arrow(A, dA, p)
            assert nth_differential(f, n, A, dA) == p


def test_derivative_hyper_examples():
    assert derivative_hyper(_mono(3), 1).pretty() == "3*Â^2 - 3*Â*δ̂1 + δ̂1^2"
    assert derivative_hyper(_mono(2), 1).pretty() == "2*Â - δ̂1"
    assert derivative_hyper(_mono(2), 2).pretty() == "2"
    assert derivative_hyper(_mono(1), 2).pretty() == "0"


def test_derivative_hyper_reproduces_nth_differential():
    rng = random.Random(5)
    for trial in range(5):
        f = _rand_series(rng, 6)
        for n in range(1, 4):
            h = derivative_hyper(f, n).to_hyper(A)
            got = apply_hyper(h, [dA] * n, base=A)
            assert got == nth_differential(f, n, A, dA)


def test_differential_recursion_instances():
    # dA * d^(n-1) A^k  ==  d^(n-1) (dA * A^k): differentials commute past powers
    pda = as_poly(dA)
    for k in range(1, 6):
        for n in range(1, 4):
            p = as_poly(A) ** k
            dprev = p
            for _ in range(n - 1):
                dprev = d_arrow(A, dA, dprev)
            rhs_arg = pda * (as_poly(A) ** k)
            dprev_shifted = rhs_arg
            for _ in range(n - 1):
                dprev_shifted = d_arrow(A, dA, dprev_shifted)
            assert pda * dprev == dprev_shifted
            # delta_A d^n A^k == n (d^(n-1) A^k * dA - d^(n-1)(dA * A^k))
            dn = p
            for _ in range(n):
                dn = d_arrow(A, dA, dn)
            lhs = inner_derivation(A, dn)
            rhs = (dprev * pda - dprev_shifted) * n
            assert lhs == rhs


def test_taylor_examples():
    coefs = taylor(_mono(2), A, B, 2)
    assert coefs == [parse("A^2"), parse("A*B + B*A"), parse("B^2")]
    assert taylor(_mono(3), A, B, 3)[1] == parse("A*A*B + A*B*A + B*A*A")
    assert taylor(_mono(2), A, B, 4)[3].is_zero()
    with pytest.raises(ValueError):
        taylor(ScalarSeries.monomial(2, truncation=4), A, B, 5)


def test_taylor_sums_to_shifted_argument():
    rng = random.Random(11)
    for _ in range(10):
        f = _rand_series(rng, 6)
        coefs = taylor(f, A, B, max(f.degree(), 0))
        total = sum(coefs, NcPoly.zero())
        assert total == f.at_poly(parse("A + B"))


def test_shift_examples():
    assert shift(_mono(2), A, B) == parse("A^2 + A*B + B*A + B^2")
    f = ScalarSeries.from_coeffs([Fraction(2), Fraction(1), Fraction(0), Fraction(1)])
    zero = NcPoly.symbol("Z") - NcPoly.symbol("Z")
    assert shift(f, A, "Z").substitute("Z", zero) == f.at_poly(A)
    assert shift(_mono(3), A, B) == sum(taylor(_mono(3), A, B, 3), NcPoly.zero())


def test_multivariate_taylor_matches_direct_substitution():
    rng = random.Random(13)
    shifts = [(A, "dA", "x"), (B, "dB", "y")]
    for _ in range(15):
        terms = {}
        for _ in range(4):
            w = tuple(rng.choice("AB") for _ in range(rng.randint(0, 4)))
            terms[w] = terms.get(w, Fraction(0)) + Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        p = NcPoly(terms)
        got = multivariate_taylor(p, shifts, max(p.degree(), 0))
        want = substitute_shifts(p, shifts)
        assert got == want


def test_multivariate_taylor_examples():
    shifts = [(A, "dA", "x"), (B, "dB", "y")]
    mt = multivariate_taylor(parse("A*B"), shifts, 2)
    assert mt.coefficient((0, 0)) == parse("A*B")
    assert mt.coefficient((1, 0)) == parse("dA*B")
    assert mt.coefficient((0, 1)) == parse("A*dB")
    assert mt.coefficient((1, 1)) == parse("dA*dB")
    # order 0 keeps only the unshifted polynomial
    assert multivariate_taylor(parse("A*B"), shifts, 0).substitute(
        {"x": Fraction(0), "y": Fraction(0)}
    ) == parse("A*B")
    # ordered mixed term of A*B*A^2
    mt2 = multivariate_taylor(parse("A*B*A^2"), shifts, 4)
    assert mt2.coefficient((1, 1)) == parse(
        "dA*dB*A*A + A*dB*dA*A + A*dB*A*dA"
    )


def test_param_poly_substitution():
    shifts = [(A, "dA", "x")]
    mt = multivariate_taylor(parse("A^2"), shifts, 2)
    at_half = mt.substitute({"x": Fraction(1, 2)})
    direct = parse("A^2").substitute("A", parse("A + 1/2*dA"))
    assert at_half == direct


def test_partial_derivative_examples():
    variables = [(A, "dA"), (B, "dB")]
    pd = partial_derivative(parse("A*B"), [B], variables)
    assert flatten(pd) == [(Fraction(1), (LeftMul(as_poly(A)),))]
    assert apply_hyper(pd, ["dB"]) == parse("A*dB")

    pd2 = partial_derivative(parse("A^2"), [A], [(A, "dA")])
    got = apply_hyper(pd2, [dA])
    assert got == parse("A*dA + dA*A")
    # matches the single-variable derivative hyperoperator at first order
    h = derivative_hyper(_mono(2), 1).to_hyper(A)
    assert got == apply_hyper(h, [dA], base=A)

    assert flatten(partial_derivative(parse("A*B*A^2"), [B, B], variables)) == []


def test_partial_derivative_reproduces_ordered_differential():
    rng = random.Random(17)
    variables = [(A, "dA"), (B, "dB")]
    from hyperderiv import ordered_differential

    for _ in range(10):
        terms = {}
        for _ in range(3):
            w = tuple(rng.choice("AB") for _ in range(rng.randint(1, 4)))
            terms[w] = terms.get(w, Fraction(0)) + Fraction(rng.randint(-2, 3) or 1)
        p = NcPoly(terms)
        n = rng.randint(1, 2)
        js = [rng.choice("AB") for _ in range(n)]
        h = partial_derivative(p, js, variables)
        got = apply_hyper(h, [f"d{j}" for j in js])
        assert got == ordered_differential(js, p, variables)


def test_chain_rule_composition():
    for p in range(1, 4):
        for q in range(1, 4):
            ga = as_poly(A) ** q
            lhs = d_arrow(A, dA, ga ** p)
            h = derivative_hyper(_mono(p), 1).to_hyper(ga)
            rhs = apply_hyper(h, [d_arrow(A, dA, ga)], base=ga)
            assert lhs == rhs


def test_lemma2_hyperoperator_form():
    rng = random.Random(19)
    pa = as_poly(A)
    for m in range(1, 7):
        q_poly = NcPoly(
            {
                tuple(rng.choice("AB") for _ in range(rng.randint(0, 3))): Fraction(
                    rng.randint(1, 3)
                )
                for _ in range(3)
            }
        )
        h = LeftMul(pa ** m) - (LeftMul(pa) - Delta(pa)) ** m
        assert apply_hyper(h, [q_poly]) == inner_derivation(pa ** m, q_poly)


def test_theorem1_invariance_seed_identity():
    for m in range(1, 9):
        f = _mono(m)
        lhs = inner_derivation(A, differential(f, A, dA))
        rhs = inner_derivation(as_poly(A) ** m, dA)
        assert lhs == rhs
