"""Quantum derivatives of operator functions given as truncated scalar series.

Differentials live in the free algebra; derivatives are hyperoperators,
either as commuting polynomials in left multiplication and the slot
derivations (integral representation) or as expression trees (rearranged
multivariate form).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .commpoly import CommPoly, CommutingHyperPoly, hyper_vars
from .freealg import NcPoly, as_poly, sym_name, sym_product
from .hyperops import (
    HyperExpr,
    HyperProd,
    HyperScale,
    HyperSum,
    LeftMul,
    d_arrow,
    ordered_differential,
    rearrange,
)
from .series import ScalarSeries


def differential(f: ScalarSeries, a, da) -> NcPoly:
    """First differential: sum of c_m {a^(m-1) da}_sym."""
    out = NcPoly.zero()
    for m in range(1, f.degree() + 1):
        c = f.coeff(m)
        if c:
            out = out + sym_product(a, da, m - 1, 1) * c
    return out


def nth_differential(f: ScalarSeries, n: int, a, da) -> NcPoly:
    """n-th differential: sum of c_m n! {a^(m-n) da^n}_sym (zero for m < n)."""
    if n < 1:
        raise ValueError("differential order must be >= 1")
    fact = Fraction(math.factorial(n))
    out = NcPoly.zero()
    for m in range(n, f.degree() + 1):
        c = f.coeff(m)
        if c:
            out = out + sym_product(a, da, m - n, n) * (c * fact)
    return out


@functools.lru_cache(maxsize=512)
def derivative_hyper(f: ScalarSeries, n: int) -> CommutingHyperPoly:
    """n-th derivative as a commuting polynomial: n! times the exact iterated
    integral of the n-th scalar derivative over the ordered simplex
    1 >= t_1 >= ... >= t_n >= 0, with left multiplication and the slot
    derivations as commuting indeterminates."""
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    hvars = hyper_vars(n)
    tvars = tuple(f"t{j}" for j in range(1, n + 1))
    ring = hvars + tvars
    lmul = CommPoly.variable(ring, hvars[0])
    arg = lmul
    for j in range(1, n + 1):
        arg = arg - CommPoly.variable(ring, hvars[j]) * CommPoly.variable(ring, tvars[j - 1])
    body = f.derivative(n).at_commpoly(arg)
    for j in range(n, 0, -1):
        upper = tvars[j - 2] if j > 1 else Fraction(1)
        body = body.integrate(tvars[j - 1], upper)
    body = body * Fraction(math.factorial(n))
    return CommutingHyperPoly.from_poly(n, body)


def taylor(f: ScalarSeries, a, b, order: int):
    """Coefficients of x^0..x^order in f(a + x b): the k-th entry is the
    k-fold degree-shift of f(a)."""
    if order > f.truncation:
        raise ValueError(f"order {order} exceeds the truncation degree {f.truncation}")
    out = []
    for k in range(order + 1):
        coef = NcPoly.zero()
        for m in range(k, f.degree() + 1):
            c = f.coeff(m)
            if c:
                coef = coef + sym_product(a, b, m - k, k) * c
        out.append(coef)
    return out


def shift(f: ScalarSeries, a, b) -> NcPoly:
    """f(a+b) through the exponential of the replacement derivation:
    sum over k of d_arrow^k f(a) / k!."""
    if f.degree() > f.truncation:
        raise ValueError("series degree exceeds truncation")
    p = f.at_poly(a)
    out = NcPoly.zero()
    k = 0
    while not p.is_zero():
        out = out + p * Fraction(1, math.factorial(k))
        p = d_arrow(a, b, p)
        k += 1
    return out


@dataclass(frozen=True)
class ParamPoly:
    """Free-algebra polynomial with commuting scalar parameters attached:
    maps parameter-exponent tuples to NcPoly coefficients."""

    params: tuple
    terms: tuple  # tuple of (exponents, NcPoly), normalized

    @classmethod
    def build(cls, params, mapping) -> "ParamPoly":
        params = tuple(params)
        items = []
        for e, p in mapping.items():
            p = as_poly(p)
            if not p.is_zero():
                items.append((tuple(e), p))
        items.sort(key=lambda kv: kv[0])
        return cls(params, tuple(items))

    @classmethod
    def constant(cls, params, p) -> "ParamPoly":
        return cls.build(params, {(0,) * len(params): as_poly(p)})

    def as_dict(self):
        return dict(self.terms)

    def coefficient(self, exponents) -> NcPoly:
        return self.as_dict().get(tuple(exponents), NcPoly.zero())

    def __add__(self, other):
        if self.params != other.params:
            raise ValueError("parameter tuples differ")
        out = self.as_dict()
        for e, p in other.terms:
            out[e] = out.get(e, NcPoly.zero()) + p
        return ParamPoly.build(self.params, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ParamPoly.build(
                self.params, {e: p * other for e, p in self.terms}
            )
        if self.params != other.params:
            raise ValueError("parameter tuples differ")
        out = {}
        for e1, p1 in self.terms:
            for e2, p2 in other.terms:
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, NcPoly.zero()) + p1 * p2
        return ParamPoly.build(self.params, out)

    def substitute(self, values) -> NcPoly:
        """Evaluate the parameters at exact rationals."""
        out = NcPoly.zero()
        for e, p in self.terms:
            c = Fraction(1)
            for name, k in zip(self.params, e):
                c *= Fraction(values[name]) ** k
            out = out + p * c
        return out


def substitute_shifts(p: NcPoly, shifts) -> ParamPoly:
    """Direct expansion of p with every occurrence of a_j replaced by
    a_j + x_j b_j; the independent route multivariate_taylor is checked
    against."""
    params = tuple(x for _, _, x in shifts)
    images = {}
    for idx, (a, b, _x) in enumerate(shifts):
        e = [0] * len(params)
        e[idx] = 1
        images[sym_name(a)] = ParamPoly.build(
            params,
            {(0,) * len(params): NcPoly.symbol(a), tuple(e): NcPoly.symbol(b)},
        )
    out = ParamPoly.build(params, {})
    for w, c in as_poly(p).sorted_terms():
        factor = ParamPoly.constant(params, NcPoly.scalar(c))
        for letter in w:
            factor = factor * images.get(
                letter, ParamPoly.constant(params, NcPoly.symbol(letter))
            )
        out = out + factor
    return out


def multivariate_taylor(p: NcPoly, shifts, order: int) -> ParamPoly:
    """Taylor expansion of p({a_j + x_j b_j}) via iterated ordered
    differentials; the total parameter degree is capped by ``order``."""
    p = as_poly(p)
    params = tuple(x for _, _, x in shifts)
    variables = [(a, b) for a, b, _x in shifts]
    q = len(shifts)
    acc = {(0,) * q: p}
    top = min(order, max(p.degree(), 0))
    for n in range(1, top + 1):
        for seq in itertools.product(range(q), repeat=n):
            js = [shifts[i][0] for i in seq]
            d = ordered_differential(js, p, variables)
            if d.is_zero():
                continue
            e = [0] * q
            for i in seq:
                e[i] += 1
            e = tuple(e)
            acc[e] = acc.get(e, NcPoly.zero()) + d
    return ParamPoly.build(params, acc)


def _split_word(word, dletters):
    """Split a word at the (leftmost, in-order) occurrences of the
    differential letters; returns the n+1 plain segments."""
    segments = []
    current = []
    need = list(dletters)
    for letter in word:
        if need and letter == need[0]:
            segments.append(tuple(current))
            current = []
            need.pop(0)
        else:
            current.append(letter)
    if need:
        raise ValueError("word does not contain the expected differentials in order")
    segments.append(tuple(current))
    return segments


def partial_derivative(p: NcPoly, js, variables=None) -> HyperExpr:
    """Ordered partial derivative as a hyperoperator: each term of the
    ordered differential is rearranged with its slots moved left-to-right,
    so applying the result to (da_j1, ..., da_jn) reproduces the ordered
    differential exactly."""
    p = as_poly(p)
    if not js:
        raise ValueError("need at least one differentiation index")
    if variables is None:
        variables = [(l, f"d{l}") for l in sorted(p.letters())]
    dmap = {sym_name(a): sym_name(da) for a, da in variables}
    names = [sym_name(j) for j in js]
    dletters = [dmap[nm] for nm in names]
    d = ordered_differential(js, p, variables)
    terms = []
    for w, c in d.sorted_terms():
        segs = _split_word(w, dletters)
        head = NcPoly.word(segs[0])
        tail = [NcPoly.word(s) for s in segs[1:]]
        node = rearrange(tail)
        if segs[0]:
            node = HyperProd((LeftMul(head), node))
        terms.append(node if c == 1 else HyperScale(c, node))
    return HyperSum(tuple(terms))
