"""Scalar functions as truncated power series with exact rational coefficients."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExprSyntaxError
from .commpoly import CommPoly
from .freealg import NcPoly, as_poly

DEFAULT_TRUNCATION = 8


@dataclass(frozen=True)
class ScalarSeries:
    """f(x) = sum c_k x^k, k = 0..N; N is the truncation degree."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("need at least the constant coefficient")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def degree(self) -> int:
        """Largest k with c_k != 0; -1 for the zero series."""
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @classmethod
    def monomial(cls, p: int, truncation=None) -> "ScalarSeries":
        n = max(p, truncation if truncation is not None else DEFAULT_TRUNCATION)
        return cls(tuple(Fraction(1) if k == p else Fraction(0) for k in range(n + 1)))

    @classmethod
    def from_coeffs(cls, coeffs) -> "ScalarSeries":
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def exp(cls, truncation=16) -> "ScalarSeries":
        return cls(tuple(Fraction(1, math.factorial(k)) for k in range(truncation + 1)))

    @classmethod
    def log1p(cls, truncation=16) -> "ScalarSeries":
        return cls(
            (Fraction(0),)
            + tuple(Fraction((-1) ** (k + 1), k) for k in range(1, truncation + 1))
        )

    def derivative(self, order: int = 1) -> "ScalarSeries":
        cs = self.coeffs
        for _ in range(order):
            cs = tuple((k + 1) * cs[k + 1] for k in range(len(cs) - 1)) or (Fraction(0),)
        return ScalarSeries(cs)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def at_poly(self, a) -> NcPoly:
        """f(a) in the free algebra (a is a symbol or polynomial)."""
        ap = as_poly(a)
        acc = NcPoly.zero()
        for c in reversed(self.coeffs):
            acc = acc * ap + NcPoly.scalar(c)
        return acc

    def at_commpoly(self, p: CommPoly) -> CommPoly:
        acc = CommPoly(p.vars)
        for c in reversed(self.coeffs):
            acc = acc * p + CommPoly.constant(p.vars, c)
        return acc

    def pretty(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            body = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            mag = abs(c)
            if not body:
                piece = str(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{mag}*{body}"
            if not parts:
                parts.append(piece if c > 0 else f"-{piece}")
            else:
                parts.append(f"+ {piece}" if c > 0 else f"- {piece}")
        return " ".join(parts) if parts else "0"


_PRESETS = {"exp": ScalarSeries.exp, "log1p": ScalarSeries.log1p}

_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:
            (?P<num>\d+(?:/\d+)?)\s*\*?\s*(?:x(?:\^(?P<pow1>\d+))?)?
          | x(?:\^(?P<pow2>\d+))?
        )\s*""",
    re.VERBOSE,
)


def parse_series(text: str, truncation=None) -> ScalarSeries:
    """Parse "x^2", "1 + x + 1/2 x^2", "3*x^4" or a preset name
    ("exp", "log1p")."""
    n = truncation if truncation is not None else DEFAULT_TRUNCATION
    stripped = text.strip()
    if stripped in _PRESETS:
        return _PRESETS[stripped](max(n, 16))
    coeffs = {}
    pos = 0
    first = True
    while pos < len(stripped):
        m = _TERM_RE.match(stripped, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError("expected a series term", pos, stripped)
        if m.group("sign") is None and not first:
            raise ExprSyntaxError("expected '+' or '-'", pos, stripped)
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("num") is not None:
            c = Fraction(m.group("num"))
            has_x = "x" in m.group(0)
            k = int(m.group("pow1")) if m.group("pow1") else (1 if has_x else 0)
        else:
            c = Fraction(1)
            k = int(m.group("pow2")) if m.group("pow2") else 1
        coeffs[k] = coeffs.get(k, Fraction(0)) + sign * c
        pos = m.end()
        first = False
    if not coeffs:
        raise ExprSyntaxError("empty series", 0, stripped)
    top = max(max(coeffs), n)
    return ScalarSeries(tuple(coeffs.get(k, Fraction(0)) for k in range(top + 1)))
