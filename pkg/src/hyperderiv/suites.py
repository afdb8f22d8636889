"""Identity catalog and the seeded verification runner.

Every identity the acceptance surface names is registered here under a
stable name, grouped into the suites "symbolic" (exact rational equality,
tolerance 0), "invariance" (matrix-level oracle agreement), "bch"
(exponential-product formulas) and "negative" (controls expected to fail;
excluded from "all").

Residual conventions: symbolic checks report 0.0 on exact equality and the
largest absolute coefficient of the difference otherwise; numeric checks
report the largest relative residual ||L-R||_F / (1+||R||_F) over the
trial's sub-checks.
"""

from __future__ import annotations

import itertools
import math
import random
import time
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .bch import (
    QuadratureRule,
    bch_product,
    bch_series_symmetric,
    bch_symmetric,
    delta_cap,
    log_oracle,
)
from .commpoly import CommPoly, hyper_vars
from .config import Config
from .errors import UnknownIdentity
from .freealg import NcPoly, as_poly, sym_product
from .hyperops import (
    Delta,
    LeftMul,
    PartialDelta,
    apply_hyper,
    d_arrow,
    delta_arrow,
    flatten,
    inner_derivation,
    ordered_differential,
    rearrange,
)
from .matproof import (
    CheckReport,
    MatrixAssignment,
    ad_matrix,
    canned_fixtures,
    eval_poly,
    frechet_oracle_n,
    func_of_matrix,
    gateaux_oracle,
    integral_rep_eval,
    left_mul_matrix,
    make_fixture,
    rel_residual,
    unvec,
    vec,
)
from .qderiv import derivative_hyper, differential, multivariate_taylor, nth_differential
from .series import ScalarSeries

_A, _B, _DA = "A", "B", "dA"


def poly_residual(lhs: NcPoly, rhs: NcPoly) -> float:
    """0.0 on exact equality, else the largest |coefficient| of the difference."""
    diff = as_poly(lhs) - as_poly(rhs)
    if diff.is_zero():
        return 0.0
    return max(abs(float(c)) for c in diff.terms.values())


def comm_residual(lhs: CommPoly, rhs: CommPoly) -> float:
    diff = lhs - rhs
    if diff.is_zero():
        return 0.0
    return max(abs(float(c)) for c in diff.terms.values())


@dataclass(frozen=True)
class TrialCtx:
    cfg: Config
    dim: int
    seed: int
    trial: int
    name: str

    def srng(self) -> random.Random:
        return random.Random(f"{self.name}|{self.seed}|{self.dim}|{self.trial}")

    def fixture(self, kind: str, scale: float = 0.5, names=("A", "B"), salt: int = 0):
        entropy = [self.seed, self.dim, self.trial, zlib.crc32(self.name.encode()) + salt]
        return make_fixture(kind, self.dim, entropy, scale, names)

    def quad(self) -> QuadratureRule:
        return QuadratureRule(self.cfg.quad_nodes)


@dataclass(frozen=True)
class IdentitySpec:
    name: str
    group: str
    per_dim: bool
    run: callable
    tol: callable
    trials: callable


REGISTRY: dict = {}


def _register(name, group, per_dim, tol, trials):
    def deco(fn):
        REGISTRY[name] = IdentitySpec(name, group, per_dim, fn, tol, trials)
        return fn

    return deco


def symbolic(name, randomized=False):
    return _register(
        name, "symbolic", False,
        tol=lambda cfg, dim: 0.0,
        trials=(lambda cfg: min(cfg.trials, 20)) if randomized else (lambda cfg: 1),
    )


def invariance(name, tol=None, trials=None):
    return _register(
        name, "invariance", True,
        tol=tol or (lambda cfg, dim: cfg.tol_exact),
        trials=trials or (lambda cfg: cfg.trials),
    )


def bch_identity(name, tol, per_dim=True, trials=None):
    return _register(
        name, "bch", per_dim,
        tol=tol,
        trials=trials or (lambda cfg: cfg.trials),
    )


def negative(name):
    return _register(
        name, "negative", True,
        tol=lambda cfg, dim: cfg.tol_exact,
        trials=lambda cfg: 1,
    )


# random generators shared by the randomized checks

def _random_ncpoly(rg: random.Random, letters, max_deg: int, n_terms: int = 4) -> NcPoly:
    terms = {}
    for _ in range(n_terms):
        k = rg.randint(0, max_deg)
        w = tuple(rg.choice(letters) for _ in range(k))
        terms[w] = terms.get(w, Fraction(0)) + Fraction(rg.randint(-4, 4), rg.randint(1, 3))
    return NcPoly(terms)


def _random_series(rg: random.Random, max_deg: int) -> ScalarSeries:
    coeffs = [Fraction(rg.randint(-3, 3), rg.randint(1, 2)) for _ in range(max_deg + 1)]
    if all(c == 0 for c in coeffs):
        coeffs[-1] = Fraction(1)
    return ScalarSeries(coeffs)


def _random_matrix(rg: np.random.Generator, d: int, norm: float) -> np.ndarray:
    x = (rg.standard_normal((d, d)) + 1j * rg.standard_normal((d, d))) / math.sqrt(2)
    return x * (norm / np.linalg.norm(x, 2))


def _nrng(ctx: TrialCtx, salt: int = 0) -> np.random.Generator:
    entropy = [ctx.seed, ctx.dim, ctx.trial, zlib.crc32(ctx.name.encode()) + salt]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def _iterate(fn, p, k):
    for _ in range(k):
        p = fn(p)
    return p


# ---------------------------------------------------------------- symbolic

@symbolic("formula1")
def _formula1(ctx):
    worst = 0.0
    for m in range(1, 6):
        for n in range(0, 5):
            lhs = -inner_derivation(_B, sym_product(_A, _B, m, n))
            rhs = inner_derivation(_A, sym_product(_A, _B, m - 1, n + 1))
            worst = max(worst, poly_residual(lhs, rhs))
    return worst


@symbolic("formula2")
def _formula2(ctx):
    worst = 0.0
    for m in range(0, 6):
        for n in range(0, 4):
            base = sym_product(_A, _B, m, n)
            for k in range(1, 7):
                got = _iterate(lambda q: delta_arrow(_A, _B, q), base, k)
                want = sym_product(_A, _B, m - k, n + k) if m >= k else NcPoly.zero()
                worst = max(worst, poly_residual(got, want))
    return worst


@symbolic("formula3")
def _formula3(ctx):
    worst = 0.0
    for p in range(0, 7):
        for n in range(1, 4):
            for m in range(0, 3):
                lhs = _iterate(lambda q: delta_arrow(_A, _B, q), sym_product(_A, _B, p, m), n)
                if p >= n:
                    falling = Fraction(math.factorial(p), math.factorial(p - n))
                    # Beta form: 1/(n-1)! * int_0^1 (1-t)^(n-1) t^(p-n) dt
                    t = CommPoly.variable(("t",), "t")
                    integrand = (1 - t) ** (n - 1) * t ** (p - n)
                    beta = integrand.integrate("t", Fraction(1)).constant_value()
                    coeff_beta = falling * beta / math.factorial(n - 1)
                    # simplex form: iterated integral of t_n^(p-n)
                    tv = tuple(f"t{j}" for j in range(1, n + 1))
                    body = CommPoly.variable(tv, tv[-1]) ** (p - n)
                    for j in range(n, 0, -1):
                        upper = tv[j - 2] if j > 1 else Fraction(1)
                        body = body.integrate(tv[j - 1], upper)
                    coeff_simplex = falling * body.constant_value()
                    if coeff_beta != coeff_simplex:
                        return 1.0
                    want = sym_product(_A, _B, p - n, m + n) * coeff_beta
                else:
                    want = NcPoly.zero()
                worst = max(worst, poly_residual(lhs, want))
    return worst


@symbolic("lemma1")
def _lemma1(ctx):
    worst = 0.0
    for m in range(1, 6):
        for n in range(0, 5):
            lhs = d_arrow(_A, _B, sym_product(_A, _B, m, n))
            rhs = sym_product(_A, _B, m - 1, n + 1) * (n + 1)
            worst = max(worst, poly_residual(lhs, rhs))
    return worst


@symbolic("formula5", randomized=True)
def _formula5(ctx):
    rg = ctx.srng()
    worst = 0.0
    polys = [as_poly(_A) ** m for m in range(0, 9)]
    coeffs = [Fraction(rg.randint(-3, 3), rg.randint(1, 2)) for _ in range(9)]
    polys.append(sum((p * c for p, c in zip(polys, coeffs)), NcPoly.zero()))
    for p in polys:
        for n in range(1, 5):
            via_d = _iterate(lambda q: d_arrow(_A, _B, q), p, n)
            via_delta = _iterate(lambda q: delta_arrow(_A, _B, q), p, n)
            worst = max(worst, poly_residual(via_d, via_delta * math.factorial(n)))
    # vanishing below the diagonal
    for m in range(0, 4):
        for n in range(m + 1, 5):
            got = _iterate(lambda q: d_arrow(_A, _B, q), as_poly(_A) ** m, n)
            worst = max(worst, poly_residual(got, NcPoly.zero()))
    return worst


@symbolic("theorem1")
def _theorem1(ctx):
    worst = 0.0
    for m in range(1, 7):
        f = ScalarSeries.monomial(m)
        lhs = inner_derivation(_A, differential(f, _A, _DA))
        rhs = inner_derivation(as_poly(_A) ** m, _DA)
        worst = max(worst, poly_residual(lhs, rhs))
    return worst


@symbolic("right_mul_representation")
def _right_mul_representation(ctx):
    pa = as_poly(_A)
    worst = 0.0
    for n in range(1, 7):
        h = (LeftMul(pa) - Delta(pa)) ** n
        got = apply_hyper(h, [_DA])
        want = as_poly(_DA) * pa ** n
        worst = max(worst, poly_residual(got, want))
    return worst


@symbolic("lemma2_symbolic", randomized=True)
def _lemma2_symbolic(ctx):
    rg = ctx.srng()
    q = _random_ncpoly(rg, (_A, _B), 3)
    pa = as_poly(_A)
    worst = 0.0
    for m in range(1, 7):
        h = LeftMul(pa ** m) - (LeftMul(pa) - Delta(pa)) ** m
        got = apply_hyper(h, [q])
        want = inner_derivation(pa ** m, q)
        worst = max(worst, poly_residual(got, want))
    return worst


@symbolic("formula6")
def _formula6(ctx):
    worst = 0.0
    for m in range(1, 7):
        f = ScalarSeries.monomial(m)
        for n in range(1, 4):
            prev = f.at_poly(_A) if n == 1 else nth_differential(f, n - 1, _A, _DA)
            lhs = inner_derivation(_A, nth_differential(f, n, _A, _DA))
            rhs = inner_derivation(prev, _DA) * n
            worst = max(worst, poly_residual(lhs, rhs))
    return worst


@symbolic("theorem4_symbolic", randomized=True)
def _theorem4_symbolic(ctx):
    rg = ctx.srng()
    fs = [ScalarSeries.monomial(p) for p in range(1, 7)] + [_random_series(rg, 6)]
    worst = 0.0
    for f in fs:
        for n in range(1, 4):
            h = derivative_hyper(f, n).to_hyper(_A)
            got = apply_hyper(h, [_DA] * n, base=_A)
            want = nth_differential(f, n, _A, _DA)
            worst = max(worst, poly_residual(got, want))
    return worst


@symbolic("formula8")
def _formula8(ctx):
    worst = 0.0
    for p in range(1, 7):
        f = ScalarSeries.monomial(p)
        for n in range(1, 4):
            for m in range(1, 4):
                xv = ("x",) + tuple(f"x{j}" for j in range(1, n + 1))
                tv = ("t",) + tuple(f"t{j}" for j in range(1, n + 1))
                ring = xv + tv
                x = CommPoly.variable(ring, "x")
                xs = [CommPoly.variable(ring, f"x{j}") for j in range(1, n + 1)]
                t = CommPoly.variable(ring, "t")
                ts = [CommPoly.variable(ring, f"t{j}") for j in range(1, n + 1)]
                # LHS
                arg = t * x
                for tj, xj in zip(ts, xs):
                    arg = arg - tj * xj
                body = f.derivative(m + 1).at_commpoly(arg)
                for j in range(n, 0, -1):
                    upper = f"t{j - 1}" if j > 1 else "t"
                    body = body.integrate(f"t{j}", upper)
                lhs = sum(xs[1:], xs[0]) * body
                # RHS
                arg1 = t * x
                for tj, xj in zip(ts[: n - 1], xs[: n - 1]):
                    arg1 = arg1 - tj * xj
                arg2 = t * (x - xs[0])
                for tj, xj in zip(ts[: n - 1], xs[1:]):
                    arg2 = arg2 - tj * xj
                rhs = f.derivative(m).at_commpoly(arg1) - f.derivative(m).at_commpoly(arg2)
                for j in range(n - 1, 0, -1):
                    upper = f"t{j - 1}" if j > 1 else "t"
                    rhs = rhs.integrate(f"t{j}", upper)
                worst = max(worst, comm_residual(lhs, rhs))
    return worst


@symbolic("theorem5", randomized=True)
def _theorem5(ctx):
    from .qderiv import taylor as taylor_op

    rg = ctx.srng()
    pa, pb = as_poly(_A), as_poly(_B)
    worst = 0.0
    fs = [ScalarSeries.monomial(p) for p in range(0, 7)] + [_random_series(rg, 6)]
    for f in fs:
        deg = max(f.degree(), 0)
        coefs = taylor_op(f, _A, _B, deg)
        worst = max(worst, poly_residual(sum(coefs, NcPoly.zero()), f.at_poly(pa + pb)))
        shifted = f.at_poly(_A)
        for k, coef in enumerate(coefs):
            if k > 0:
                shifted = delta_arrow(_A, _B, shifted) if not shifted.is_zero() else shifted
            worst = max(worst, poly_residual(coef, shifted))
    return worst


@symbolic("theorem6", randomized=True)
def _theorem6(ctx):
    rg = ctx.srng()
    pa, pda = as_poly(_A), as_poly(_DA)
    worst = 0.0
    fs = [ScalarSeries.monomial(p) for p in range(0, 7)] + [_random_series(rg, 6)]
    for f in fs:
        deg = max(f.degree(), 0)
        for x in (Fraction(1, 2), Fraction(1)):
            direct = f.at_poly(pa + pda * x)
            series = f.at_poly(pa)
            for n in range(1, deg + 1):
                series = series + nth_differential(f, n, _A, _DA) * (x ** n / math.factorial(n))
            worst = max(worst, poly_residual(direct, series))
    return worst


@symbolic("formula9_10_11", randomized=True)
def _formula9_10_11(ctx):
    rg = ctx.srng()
    variables = [(_A, "dA"), (_B, "dB")]
    dmap = dict(variables)
    p = _random_ncpoly(rg, (_A, _B), 5)
    worst = 0.0
    for n in range(1, 4):
        for seq in itertools.product((_A, _B), repeat=n):
            lhs = p
            for j in reversed(seq):
                lhs = d_arrow(j, dmap[j], lhs)
            rhs = NcPoly.zero()
            for perm in itertools.permutations(seq):
                rhs = rhs + ordered_differential(perm, p, variables)
            worst = max(worst, poly_residual(lhs, rhs))
        # Formula 10: d_j^n = n! d_{j,...,j}
        for j in (_A, _B):
            lhs = _iterate(lambda q: d_arrow(j, dmap[j], q), p, n)
            rhs = ordered_differential([j] * n, p, variables) * math.factorial(n)
            worst = max(worst, poly_residual(lhs, rhs))
        # Formula 11: d^n = n! * sum over index sequences of ordered differentials
        total = _iterate(lambda q: d_arrow(_A, "dA", q) + d_arrow(_B, "dB", q), p, n)
        rhs = NcPoly.zero()
        for seq in itertools.product((_A, _B), repeat=n):
            rhs = rhs + ordered_differential(seq, p, variables)
        worst = max(worst, poly_residual(total, rhs * math.factorial(n)))
    return worst


@symbolic("ordered_differential_golden")
def _ordered_differential_golden(ctx):
    from .parser import parse

    p = parse("A*B*A*A")
    variables = [(_A, "dA"), (_B, "dB")]
    worst = 0.0
    worst = max(worst, poly_residual(
        ordered_differential([_A, _B], p, variables), parse("dA*dB*A*A")))
    worst = max(worst, poly_residual(
        ordered_differential([_B, _A], p, variables), parse("A*dB*dA*A + A*dB*A*dA")))
    worst = max(worst, poly_residual(
        ordered_differential([_B, _B], p, variables), NcPoly.zero()))
    # ordered (A, A) must halve the iterated derivation (Formula 10 normalization)
    twice = d_arrow(_A, "dA", d_arrow(_A, "dA", p))
    worst = max(worst, poly_residual(
        ordered_differential([_A, _A], p, variables) * 2, twice))
    return worst


def _formula12_expected(f1, f2, f3):
    """Flattened golden structures of the three printed rearrangements."""
    e1 = {(Fraction(1), (LeftMul(f1),)), (Fraction(-1), (PartialDelta(f1, 1),))}
    e2 = {
        (Fraction(1), (LeftMul(f1 * f2),)),
        (Fraction(-1), (LeftMul(f1), PartialDelta(f2, 2))),
        (Fraction(-1), (PartialDelta(f1 * f2, 1),)),
        (Fraction(1), (PartialDelta(f1, 1), PartialDelta(f2, 2))),
    }
    e3 = {
        (Fraction(1), (LeftMul(f1 * f2 * f3),)),
        (Fraction(-1), (LeftMul(f1 * f2), PartialDelta(f3, 3))),
        (Fraction(1), (LeftMul(f1), PartialDelta(f2, 2), PartialDelta(f3, 3))),
        (Fraction(-1), (LeftMul(f1), PartialDelta(f2 * f3, 2))),
        (Fraction(-1), (PartialDelta(f1 * f2 * f3, 1),)),
        (Fraction(1), (PartialDelta(f1, 1), PartialDelta(f2 * f3, 2))),
        (Fraction(1), (PartialDelta(f1 * f2, 1), PartialDelta(f3, 3))),
        (Fraction(-1), (PartialDelta(f1, 1), PartialDelta(f2, 2), PartialDelta(f3, 3))),
    }
    return e1, e2, e3


@symbolic("formula12", randomized=True)
def _formula12(ctx):
    rg = ctx.srng()
    f1, f2, f3 = (as_poly(s) for s in ("f1", "f2", "f3"))
    expected = _formula12_expected(f1, f2, f3)
    for n, want in zip((1, 2, 3), expected):
        got = set(flatten(rearrange([f1, f2, f3][:n])))
        if got != want:
            return 1.0
    worst = 0.0
    for _ in range(5):
        n = rg.randint(1, 3)
        fs = [_random_ncpoly(rg, (_A, _B), 2, 3) for _ in range(n)]
        qs = [_random_ncpoly(rg, (_A, _B), 2, 3) for _ in range(n)]
        got = apply_hyper(rearrange(fs), qs)
        want = NcPoly.one()
        for q, f in zip(qs, fs):
            want = want * q * f
        worst = max(worst, poly_residual(got, want))
    return worst


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@symbolic("lemmaA")
def _lemma_a(ctx):
    worst = 0.0
    for m in range(1, 7):
        for n in range(1, min(3, m) + 1):
            hv = hyper_vars(n)
            tv = tuple(f"t{j}" for j in range(1, n + 1))
            ring = hv + tv
            ahat = CommPoly.variable(ring, hv[0])
            deltas = [CommPoly.variable(ring, hv[j]) for j in range(1, n + 1)]
            prefixes = [ahat]
            acc = ahat
            for dlt in deltas:
                acc = acc - dlt
                prefixes.append(acc)
            lhs = CommPoly(ring)
            for comp in _compositions(m - n, n + 1):
                term = CommPoly.constant(ring, 1)
                for base, k in zip(prefixes, comp):
                    term = term * base ** k
                lhs = lhs + term
            arg = ahat
            for tj, dlt in zip(tv, deltas):
                arg = arg - CommPoly.variable(ring, tj) * dlt
            body = arg ** (m - n)
            for j in range(n, 0, -1):
                upper = tv[j - 2] if j > 1 else Fraction(1)
                body = body.integrate(tv[j - 1], upper)
            rhs = body * Fraction(math.factorial(m), math.factorial(m - n))
            worst = max(worst, comm_residual(lhs, rhs))
            # cross-check the integral path used by derivative_hyper
            dh = derivative_hyper(ScalarSeries.monomial(m), n).poly
            worst = max(
                worst,
                comm_residual(dh, (rhs * math.factorial(n)).rename_onto(hv)),
            )
    return worst


@symbolic("gauge_consistency", randomized=True)
def _gauge_consistency(ctx):
    rg = ctx.srng()
    p = NcPoly.zero()
    for _ in range(4):
        m, n = rg.randint(0, 4), rg.randint(0, 3)
        p = p + sym_product(_A, _B, m, n) * Fraction(rg.randint(-3, 3), rg.randint(1, 2))
    lhs = inner_derivation(_A, delta_arrow(_A, _B, p))
    rhs = -inner_derivation(_B, p)
    return poly_residual(lhs, rhs)


@symbolic("chain_rule")
def _chain_rule(ctx):
    worst = 0.0
    for p in range(1, 4):
        for q in range(1, 4):
            ga = as_poly(_A) ** q
            fg = ga ** p
            lhs = d_arrow(_A, _DA, fg)
            dga = d_arrow(_A, _DA, ga)
            h = derivative_hyper(ScalarSeries.monomial(p), 1).to_hyper(ga)
            rhs = apply_hyper(h, [dga], base=ga)
            worst = max(worst, poly_residual(lhs, rhs))
    return worst


# -------------------------------------------------------------- invariance

def _theorem2_cases(ctx):
    cases = []
    fx = ctx.fixture("random", names=("A", "E"))
    cases.append((fx["A"], fx["E"], None, None))
    fx = ctx.fixture("commuting", names=("A", "E"))
    cases.append((fx["A"], fx["E"], None, None))
    fx = ctx.fixture("auxiliary_pair")
    cases.append((fx["A"], fx["dA"], fx["H"], fx))
    fx = ctx.fixture("multivariate_auxiliary")
    cases.append((fx["A1"], fx["dA1"], fx["H1"], fx))
    return cases


@invariance("theorem2")
def _theorem2(ctx):
    worst = 0.0
    for a, e, h, _fx in _theorem2_cases(ctx):
        if h is not None:
            # the commutator realization requires [H,[H,A]] = 0 exactly
            da = h @ a - a @ h
            worst = max(worst, float(np.linalg.norm(h @ da - da @ h)))
        for m in range(1, 7):
            f = ScalarSeries.monomial(m)
            block = gateaux_oracle(f, a, e)
            integral = integral_rep_eval(f, 1, a, [e])
            worst = max(worst, rel_residual(block, integral))
            if h is not None:
                fa = func_of_matrix(f, a)
                comm = h @ fa - fa @ h
                worst = max(worst, rel_residual(comm, block))
    return worst


@invariance("formulaA")
def _formula_a_numeric(ctx):
    fx = ctx.fixture("random", names=("A", "Q"))
    a, q = fx["A"], fx["Q"]
    lmat = left_mul_matrix(a)
    admat = ad_matrix(a)
    worst = 0.0
    for m in range(1, 7):
        f = ScalarSeries.monomial(m)
        lhs = func_of_matrix(f, lmat - admat) @ vec(q)
        fa = func_of_matrix(f, a)
        worst = max(worst, rel_residual(lhs, vec(q @ fa)))
    return worst


@invariance("lemma2")
def _lemma2_vec(ctx):
    fx = ctx.fixture("random", names=("A", "Q"))
    a, q = fx["A"], fx["Q"]
    lmat = left_mul_matrix(a)
    admat = ad_matrix(a)
    worst = 0.0
    for m in range(1, 7):
        f = ScalarSeries.monomial(m)
        fa = func_of_matrix(f, a)
        lhs = vec(fa @ q - q @ fa)
        rhs = (func_of_matrix(f, lmat) - func_of_matrix(f, lmat - admat)) @ vec(q)
        worst = max(worst, rel_residual(lhs, rhs))
    return worst


def _theorem4_tol(cfg, dim):
    return 1e-12 if dim == 2 else cfg.tol_exact


@_register("theorem4", "invariance", True, _theorem4_tol, lambda cfg: cfg.trials)
def _theorem4_oracle(ctx):
    rg = ctx.srng()
    fx = ctx.fixture("random", names=("A", "E"))
    a, e = fx["A"], fx["E"]
    worst = 0.0
    for n in range(1, 4):
        f = _random_series(rg, 6)
        got = integral_rep_eval(f, n, a, [e] * n)
        want = frechet_oracle_n(f, a, e, n)
        worst = max(worst, rel_residual(got, want))
    return worst


@invariance("theorem7")
def _theorem7_matrix(ctx):
    rg = ctx.srng()
    fx = ctx.fixture("random", names=("A", "B", "dA", "dB"))
    p = _random_ncpoly(rg, (_A, _B), 4)
    shifts = [(_A, "dA", "x"), (_B, "dB", "y")]
    xval, yval = Fraction(1, 2), Fraction(1, 3)
    expansion = multivariate_taylor(p, shifts, max(p.degree(), 0))
    lhs = eval_poly(expansion.substitute({"x": xval, "y": yval}), fx)
    shifted = MatrixAssignment(
        ctx.dim,
        {
            _A: fx[_A] + float(xval) * fx["dA"],
            _B: fx[_B] + float(yval) * fx["dB"],
        },
        fx.seed,
        fx.scale,
    )
    rhs = eval_poly(p, shifted)
    return rel_residual(lhs, rhs)


@invariance("theorem5_matrix")
def _theorem5_matrix(ctx):
    from .qderiv import taylor as taylor_op

    rg = ctx.srng()
    fx = ctx.fixture("random")
    f = _random_series(rg, 6)
    deg = max(f.degree(), 0)
    coefs = taylor_op(f, _A, _B, deg)
    evaluated = [eval_poly(c, fx) for c in coefs]
    worst = 0.0
    for x in (0.5, 1.0):
        lhs = sum(x ** n * c for n, c in enumerate(evaluated))
        rhs = func_of_matrix(f, fx[_A] + x * fx[_B])
        worst = max(worst, rel_residual(lhs, rhs))
    return worst


@invariance("auxiliary_taylor", tol=lambda cfg, dim: 1e-9)
def _auxiliary_taylor(ctx):
    rg = ctx.srng()
    fx = ctx.fixture("multivariate_auxiliary")
    q = fx.var_count()
    letters = tuple(f"A{j}" for j in range(1, q + 1))
    f = _random_ncpoly(rg, letters, 3)
    xs = [0.6, -0.45, 0.3, 0.25][:q]
    fval = eval_poly(f, fx)
    w = sum(x * ad_matrix(fx[f"H{j + 1}"]) for j, x in enumerate(xs))
    lhs = unvec(expm(w) @ vec(fval))
    moved = {}
    shifted = {}
    for j, x in enumerate(xs, start=1):
        adh = ad_matrix(fx[f"H{j}"])
        moved[f"A{j}"] = unvec(expm(xs[j - 1] * adh) @ vec(fx[f"A{j}"]))
        shifted[f"A{j}"] = fx[f"A{j}"] + x * fx[f"dA{j}"]
    rhs_moved = eval_poly(f, MatrixAssignment(ctx.dim, moved, fx.seed, fx.scale))
    rhs_shift = eval_poly(f, MatrixAssignment(ctx.dim, shifted, fx.seed, fx.scale))
    return max(rel_residual(lhs, rhs_moved), rel_residual(lhs, rhs_shift))


@invariance("parameter_chain_rule", tol=lambda cfg, dim: cfg.tol_fd)
def _parameter_chain_rule(ctx):
    rg = ctx.srng()
    fx = ctx.fixture("random", names=("A0", "A1"))
    a0, a1 = fx["A0"], fx["A1"]
    f = _random_series(rg, 6)
    h = 1e-5
    fd = (func_of_matrix(f, a0 + h * a1) - func_of_matrix(f, a0 - h * a1)) / (2 * h)
    return rel_residual(fd, integral_rep_eval(f, 1, a0, [a1]))


# --------------------------------------------------------------------- bch

@bch_identity("exp_derivative", tol=lambda cfg, dim: 1e-9)
def _exp_derivative(ctx):
    rg = _nrng(ctx)
    a = _random_matrix(rg, ctx.dim, 0.4)
    e = _random_matrix(rg, ctx.dim, 0.8)
    f = ScalarSeries.exp(16)
    lhs = gateaux_oracle(f, a, e)
    rhs = expm(a) @ delta_cap(-a, e)
    return rel_residual(lhs, rhs)


@bch_identity("bch_symmetric", tol=lambda cfg, dim: 1e-8)
def _bch_symmetric_check(ctx):
    rg = _nrng(ctx)
    a = _random_matrix(rg, ctx.dim, 0.3)
    b = _random_matrix(rg, ctx.dim, 0.3)
    got = bch_symmetric(a, b, ctx.quad())
    worst = rel_residual(got, log_oracle([a, b, a]))
    direct = expm(a) @ expm(b) @ expm(a)
    worst = max(worst, rel_residual(expm(got), direct))
    return worst


@bch_identity("bch_product", tol=lambda cfg, dim: 1e-7)
def _bch_product_check(ctx):
    rg = _nrng(ctx)
    worst = 0.0
    for r in (2, 3, 4):
        mats = [_random_matrix(rg, ctx.dim, 0.75 / r) for _ in range(r)]
        got = bch_product(mats, ctx.quad())
        worst = max(worst, rel_residual(got, log_oracle(mats)))
    return worst


@bch_identity("quad_doubling", tol=lambda cfg, dim: 1e-10, per_dim=False,
              trials=lambda cfg: 1)
def _quad_doubling(ctx):
    worst = 0.0
    base = QuadratureRule(32)
    fine = QuadratureRule(64)
    for fx in canned_fixtures():
        a, b = fx["A"], fx["B"]
        coarse = bch_symmetric(a, b, base, check_convergence=False)
        refined = bch_symmetric(a, b, fine, check_convergence=False)
        worst = max(worst, rel_residual(refined, coarse))
    return worst


@bch_identity("bch_series_rate", tol=lambda cfg, dim: 3.0, per_dim=False,
              trials=lambda cfg: 1)
def _bch_series_rate(ctx):
    rg = _nrng(ctx)
    d = 3
    x = _random_matrix(rg, d, 1.0)
    y = _random_matrix(rg, d, 1.0)

    def err(order, norm):
        series = bch_series_symmetric(order)
        fx = MatrixAssignment(d, {"A": norm * x, "B": norm * y}, ctx.seed, norm)
        return float(np.linalg.norm(
            eval_poly(series, fx)
            - bch_symmetric(norm * x, norm * y, ctx.quad(), check_convergence=False)
        ))

    worst = 1.0
    for order in (2, 3):
        ratio = err(order, 0.05) / err(order, 0.025)
        predicted = 2.0 ** (order + 1)
        worst = max(worst, ratio / predicted, predicted / ratio)
    return worst


# ---------------------------------------------------------------- negative

@negative("perturbed_lemma2")
def _perturbed_lemma2(ctx):
    fx = ctx.fixture("random", names=("A", "Q"))
    a, q = fx["A"], fx["Q"]
    lmat = left_mul_matrix(a)
    admat = ad_matrix(a)
    f = ScalarSeries.monomial(4)
    fa = func_of_matrix(f, a)
    lhs = vec(fa @ q - q @ fa)
    rhs = (func_of_matrix(f, lmat) - func_of_matrix(f, lmat - admat)) @ vec(q)
    # unit-normalize so the detector reads in units of the injected error
    scale = np.linalg.norm(rhs)
    return rel_residual(lhs / scale, rhs * (1.0 + 1e-6) / scale)


# -------------------------------------------------------------- the runner

SUITE_GROUPS = ("symbolic", "invariance", "bch", "negative")


def identity_names(group=None):
    return [n for n, s in REGISTRY.items() if group is None or s.group == group]


def suite_names():
    return list(SUITE_GROUPS) + ["all"] + identity_names()


def _resolve_selector(selector: str):
    if selector == "all":
        return [n for n, s in REGISTRY.items() if s.group != "negative"]
    if selector in SUITE_GROUPS:
        return identity_names(selector)
    if selector in REGISTRY:
        return [selector]
    raise UnknownIdentity(f"unknown suite or identity {selector!r}")


def check_identity(name: str, *, dim: int, seed: int, trials: int,
                   tol=None, cfg: Config | None = None) -> CheckReport:
    """Run one catalog identity for the given trial count; deterministic for
    fixed (seed, dim, trials)."""
    spec = REGISTRY.get(name)
    if spec is None:
        raise UnknownIdentity(f"identity {name!r} is not in the catalog")
    cfg = cfg or Config()
    tol_val = float(tol) if tol is not None else float(spec.tol(cfg, dim))
    start = time.perf_counter()
    worst = 0.0
    for trial in range(trials):
        ctx = TrialCtx(cfg=cfg, dim=dim, seed=seed, trial=trial, name=name)
        worst = max(worst, float(spec.run(ctx)))
    runtime_ms = (time.perf_counter() - start) * 1000.0
    return CheckReport(
        identity=name,
        trials=trials,
        dim=dim,
        seed=seed,
        max_residual=worst,
        tol=tol_val,
        passed=worst <= tol_val,
        runtime_ms=runtime_ms,
    )


def run_suite(selector: str, cfg: Config | None = None, *, dims=None,
              trials=None, seed=None, tol=None):
    """Run a suite (or single identity) across the configured dimensions;
    returns CheckReports in catalog order."""
    cfg = cfg or Config()
    dims = tuple(dims) if dims else cfg.dims
    seed = cfg.seed if seed is None else seed
    reports = []
    for name in _resolve_selector(selector):
        spec = REGISTRY[name]
        n_trials = trials if trials is not None else spec.trials(cfg)
        run_dims = dims if spec.per_dim else (0,)
        for d in run_dims:
            reports.append(
                check_identity(name, dim=d, seed=seed, trials=n_trials, tol=tol, cfg=cfg)
            )
    return reports
