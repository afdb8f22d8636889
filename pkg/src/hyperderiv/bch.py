"""Exponential-product formulas evaluated through hyperoperator functions.

The symmetric formula writes log(e^A e^B e^A) as B plus an integral of
g2(E(t)) applied to A, with E(t) the product of adjoint exponentials; the
multi-factor recursion peels the outer factors with g1 and recurses on the
middle block. Both are checked against the principal matrix logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm, logm

from .errors import QuadratureNotConverged
from .freealg import NcPoly, as_poly
from .matproof import G1_FUNC, G2_FUNC, PHI1, ad_matrix, func_of_matrix, rel_residual, unvec, vec


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights affine-mapped to [0, 1]; exact for
    polynomial integrands of degree <= 2*nodes - 1."""

    nodes: int
    points: tuple = field(default=(), compare=False)
    weights: tuple = field(default=(), compare=False)
    kind: str = "gauss-legendre"

    def __post_init__(self):
        if not self.points:
            x, w = np.polynomial.legendre.leggauss(self.nodes)
            object.__setattr__(self, "points", tuple((x + 1.0) / 2.0))
            object.__setattr__(self, "weights", tuple(w / 2.0))

    def integrate(self, fn) -> np.ndarray:
        acc = None
        for t, w in zip(self.points, self.weights):
            val = w * fn(t)
            acc = val if acc is None else acc + val
        return acc

    def doubled(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.nodes)


DEFAULT_QUAD = QuadratureRule(32)


def delta_cap(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """phi1 of the inner derivation of a, applied to x."""
    a = np.asarray(a, complex)
    return unvec(func_of_matrix(PHI1, ad_matrix(a)) @ vec(np.asarray(x, complex)))


def _symmetric_once(a, b, quad: QuadratureRule) -> np.ndarray:
    ada, adb = ad_matrix(a), ad_matrix(b)
    eb = expm(adb)
    va = vec(a)

    def node(t):
        et = expm(t * ada)
        e = et @ eb @ et
        return unvec(func_of_matrix(G2_FUNC, e) @ va)

    return quad.integrate(node) + b


def bch_symmetric(a: np.ndarray, b: np.ndarray, quad: QuadratureRule = DEFAULT_QUAD,
                  tol: float = 1e-8, check_convergence: bool = True) -> np.ndarray:
    """log(e^a e^b e^a) by the integral formula; node doubling guards the
    quadrature (callers keep spectral norms <= 0.5 for branch safety)."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    coarse = _symmetric_once(a, b, quad)
    if not check_convergence:
        return coarse
    fine = _symmetric_once(a, b, quad.doubled())
    if rel_residual(fine, coarse) > tol / 10.0:
        raise QuadratureNotConverged(
            f"doubling {quad.nodes} nodes moved the symmetric result by more than {tol / 10.0:g}"
        )
    return fine


def _product_once(mats, quad: QuadratureRule) -> np.ndarray:
    r = len(mats)
    if r == 0:
        return None
    if r == 1:
        return mats[0]
    first, last = mats[0], mats[-1]
    ad_first, ad_last = ad_matrix(first), ad_matrix(last)
    mid = np.eye(ad_first.shape[0], dtype=complex)
    for x in mats[1:-1]:
        mid = mid @ expm(ad_matrix(x))
    v_first, v_last = vec(first), vec(last)

    def node(t):
        e = expm(t * ad_first) @ mid @ expm(t * ad_last)
        return unvec(func_of_matrix(G1_FUNC, e) @ (v_first + e @ v_last))

    head = quad.integrate(node)
    inner = _product_once(mats[1:-1], quad)
    return head if inner is None else head + inner


def bch_product(mats, quad: QuadratureRule = DEFAULT_QUAD, tol: float = 1e-7,
                check_convergence: bool = True) -> np.ndarray:
    """log(e^A1 ... e^Ar) by the recursive peeling formula (callers keep the
    summed spectral norms <= 0.8)."""
    mats = [np.asarray(x, complex) for x in mats]
    if len(mats) < 2:
        raise ValueError("need at least two factors")
    coarse = _product_once(mats, quad)
    if not check_convergence:
        return coarse
    fine = _product_once(mats, quad.doubled())
    if rel_residual(fine, coarse) > tol / 10.0:
        raise QuadratureNotConverged(
            f"doubling {quad.nodes} nodes moved the product result by more than {tol / 10.0:g}"
        )
    return fine


def log_oracle(mats) -> np.ndarray:
    """Principal matrix logarithm of the product of exponentials (inverse
    scaling-and-squaring); the independent reference for both variants."""
    acc = None
    for x in mats:
        e = expm(np.asarray(x, complex))
        acc = e if acc is None else acc @ e
    return logm(acc)


def _exp_truncated(p: NcPoly, order: int) -> NcPoly:
    out = NcPoly.one()
    term = NcPoly.one()
    for k in range(1, order + 1):
        term = (term * p).truncated(order)
        out = out + term * Fraction(1, math.factorial(k))
    return out


def _log1p_truncated(x: NcPoly, order: int) -> NcPoly:
    out = NcPoly.zero()
    power = NcPoly.one()
    for k in range(1, order + 1):
        power = (power * x).truncated(order)
        out = out + power * Fraction((-1) ** (k + 1), k)
    return out


def bch_series_symmetric(order: int, a="A", b="B") -> NcPoly:
    """Free-algebra truncation of log(e^a e^b e^a) to total degree <= order;
    the degree-2 part cancels, so the leading terms are 2a + b."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if order > 6:
        raise ValueError("series truncation supported up to degree 6")
    pa, pb = as_poly(a), as_poly(b)
    prod = (
        _exp_truncated(pa, order) * _exp_truncated(pb, order) * _exp_truncated(pa, order)
    ).truncated(order)
    return _log1p_truncated(prod - NcPoly.one(), order)
