import math
from fractions import Fraction

import numpy as np
import pytest

from hyperderiv import NcPoly, ScalarSeries, UnassignedSymbol, parse, sym_product
from hyperderiv.errors import BadDimension, SpectrumOutOfDomain
from hyperderiv.matproof import (
    CheckReport,
    MatrixAssignment,
    PHI1,
    ad_matrix,
    canned_fixtures,
    eval_poly,
    frechet_oracle_n,
    func_of_matrix,
    gateaux_oracle,
    hyper_func_apply,
    integral_rep_eval,
    left_mul_matrix,
    make_fixture,
    rel_residual,
    unvec,
    vec,
)


def _randmats(seed, d, n=2, norm=1.0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        out.append(x * (norm / np.linalg.norm(x, 2)))
    return out


def test_ad_matrix_contract():
    a, q = _randmats(0, 4)
    m = ad_matrix(a)
    assert rel_residual(m @ vec(q), vec(a @ q - q @ a)) < 1e-13


def test_ad_matrix_diagonal_and_identity():
    d = np.diag([1.0, 2.0, 5.0])
    got = np.diag(ad_matrix(d))
    want = np.array([i - j for i in (1, 2, 5) for j in (1, 2, 5)], dtype=float)
    assert np.allclose(got, want)
    assert np.linalg.norm(ad_matrix(np.eye(3))) == 0.0


def test_left_mul_matrix_contract():
    a, q = _randmats(1, 3)
    assert rel_residual(left_mul_matrix(a) @ vec(q), vec(a @ q)) < 1e-14


def test_eval_poly_examples():
    m = make_fixture("random", 3, 42)
    assert np.allclose(eval_poly(NcPoly.one(), m), np.eye(3))
    mc = make_fixture("commuting", 3, 7)
    assert np.linalg.norm(eval_poly(parse("A*B - B*A"), mc)) < 1e-15
    p = sym_product("A", "B", 2, 1)
    a, b = m["A"], m["B"]
    direct = a @ a @ b + a @ b @ a + b @ a @ a
    assert rel_residual(eval_poly(p, m), direct) < 1e-14
    with pytest.raises(UnassignedSymbol):
        eval_poly(parse("A*C"), m)


def test_fixture_determinism_and_scaling():
    m1 = make_fixture("random", 3, 42, scale=0.5)
    m2 = make_fixture("random", 3, 42, scale=0.5)
    assert all(np.array_equal(m1[k], m2[k]) for k in ("A", "B"))
    assert np.linalg.norm(m1["A"], 2) <= 0.5 + 1e-12
    m3 = make_fixture("random", 3, 43)
    assert not np.array_equal(m1["A"], m3["A"])


def test_auxiliary_pair_exact_nilpotency():
    for d in (2, 3, 4, 5):
        fx = make_fixture("auxiliary_pair", d, 11)
        h, a = fx["H"], fx["A"]
        da = h @ a - a @ h
        assert np.array_equal(fx["dA"], da)
        assert np.linalg.norm(h @ da - da @ h) == 0.0
        assert np.linalg.norm(da) > 0
    with pytest.raises(BadDimension):
        make_fixture("auxiliary_pair", 1, 0)


def test_multivariate_auxiliary_conditions():
    for d in (2, 4, 5):
        fx = make_fixture("multivariate_auxiliary", d, 13)
        q = fx.var_count()
        assert q == max(1, d // 2)
        for j in range(1, q + 1):
            hj = fx[f"H{j}"]
            daj = fx[f"dA{j}"]
            assert np.linalg.norm(hj @ daj - daj @ hj) == 0.0
            for k in range(1, q + 1):
                if k == j:
                    continue
                hk, ak = fx[f"H{k}"], fx[f"A{k}"]
                assert np.linalg.norm(hj @ hk - hk @ hj) == 0.0
                assert np.linalg.norm(hj @ ak - ak @ hj) == 0.0
                dak = fx[f"dA{k}"]
                assert np.linalg.norm(hj @ dak - dak @ hj) == 0.0


def test_unknown_fixture_kind():
    with pytest.raises(ValueError):
        make_fixture("exotic", 3, 0)


def test_gateaux_oracle_examples():
    a, e = _randmats(2, 3, norm=0.8)
    f2 = ScalarSeries.monomial(2)
    assert rel_residual(gateaux_oracle(f2, a, e), a @ e + e @ a) < 1e-14
    assert rel_residual(gateaux_oracle(ScalarSeries.monomial(1), a, e), e) < 1e-15


def test_gateaux_vs_finite_difference():
    a, e = _randmats(3, 3, norm=0.6)
    f = ScalarSeries.from_coeffs([Fraction(1, 3), 0, 2, Fraction(-1, 2), 0, 1])
    h = 1e-5

    def poly_at(x):
        out = np.zeros_like(a)
        for k, c in enumerate(f.coeffs):
            out = out + complex(c) * np.linalg.matrix_power(x, k)
        return out

    fd = (poly_at(a + h * e) - poly_at(a - h * e)) / (2 * h)
    assert rel_residual(gateaux_oracle(f, a, e), fd) < 1e-8


def test_frechet_oracle_examples():
    a, e = _randmats(4, 3, norm=0.7)
    f2 = ScalarSeries.monomial(2)
    assert rel_residual(frechet_oracle_n(f2, a, e, 2), 2 * e @ e) < 1e-14
    assert np.linalg.norm(frechet_oracle_n(f2, a, e, 3)) == 0.0
    f3 = ScalarSeries.monomial(3)
    from hyperderiv.qderiv import nth_differential

    sym = nth_differential(f3, 2, "A", "dA")
    direct = eval_poly(sym, MatrixAssignment(3, {"A": a, "dA": e}, 0, 1.0))
    assert rel_residual(frechet_oracle_n(f3, a, e, 2), direct) < 1e-12


def test_integral_rep_eval_examples():
    a, e = _randmats(5, 3, norm=0.5)
    f2 = ScalarSeries.monomial(2)
    assert rel_residual(integral_rep_eval(f2, 1, a, [e]), a @ e + e @ a) < 1e-13
    # commuting pair: all derivation powers vanish
    d1 = np.diag([0.1, 0.4, -0.2]).astype(complex)
    d2 = np.diag([0.3, -0.1, 0.2]).astype(complex)
    for m in range(1, 6):
        fm = ScalarSeries.monomial(m)
        want = m * np.linalg.matrix_power(d1, m - 1) @ d2
        assert rel_residual(integral_rep_eval(fm, 1, d1, [d2]), want) < 1e-13
    f4 = ScalarSeries.monomial(4)
    assert rel_residual(
        integral_rep_eval(f4, 2, a, [e, e]), frechet_oracle_n(f4, a, e, 2)
    ) < 1e-12
    with pytest.raises(ValueError):
        integral_rep_eval(f4, 2, a, [e])


def test_hyper_func_apply_examples():
    a, x = _randmats(6, 3, norm=0.5)
    const = ScalarSeries.from_coeffs([Fraction(1)])
    assert rel_residual(hyper_func_apply(const, ad_matrix(a), x), x) < 1e-15
    ident = ScalarSeries.from_coeffs([0, 1])
    assert rel_residual(hyper_func_apply(ident, ad_matrix(a), x), a @ x - x @ a) < 1e-14
    # phi1 is the identity on commuting operands
    d1 = np.diag([0.2, -0.1, 0.3]).astype(complex)
    d2 = np.diag([0.1, 0.5, -0.4]).astype(complex)
    assert rel_residual(hyper_func_apply("phi1", ad_matrix(d1), d2), d2) < 1e-14


def test_func_of_matrix_series_fallback_on_defective_input():
    # nilpotent adjoint: eigenvectors are defective, phi1 series still converges
    n = np.zeros((2, 2))
    n[0, 1] = 1.0
    x = np.array([[0.3, -0.2], [0.4, 0.1]])
    got = hyper_func_apply(PHI1, ad_matrix(n), x)
    c1 = n @ x - x @ n
    c2 = n @ c1 - c1 @ n
    want = x + c1 / 2 + c2 / 6
    assert rel_residual(got, want) < 1e-14


def test_func_of_matrix_spectrum_out_of_domain():
    # defective matrix with spectrum far outside g1's series disk about 1
    jordan = np.array([[4.0, 1.0], [0.0, 4.0]])
    with pytest.raises(SpectrumOutOfDomain):
        func_of_matrix("g1", jordan)


def test_g_functions_at_their_singular_points():
    from hyperderiv.matproof import G1_FUNC, G2_FUNC

    assert abs(PHI1.scalar(0.0) - 1.0) < 1e-15
    assert abs(G1_FUNC.scalar(1.0) - 1.0) < 1e-15
    assert abs(G2_FUNC.scalar(1.0) - 2.0) < 1e-15
    assert abs(G1_FUNC.scalar(1.5) - math.log(1.5) / 0.5) < 1e-14


def test_canned_fixtures_shape():
    for fx in canned_fixtures():
        assert fx.kind == "canned"
        assert fx["A"].shape == (fx.dim, fx.dim)


def test_check_report_round_trip():
    r = CheckReport("x", 5, 3, 42, 1e-12, 1e-10, True, 12.5)
    obj = r.to_obj()
    assert obj["pass"] is True
    assert CheckReport.from_obj(obj) == r
