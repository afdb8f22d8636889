"""Sparse commuting multivariate polynomials with exact rational coefficients.

Used wherever left multiplication and the slot derivations can be treated
as commuting indeterminates, and for exact iterated integration over
ordered simplices (antidifferentiate, then substitute the upper bound).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .hyperops import HyperExpr, HyperProd, HyperScale, HyperSum, LeftMul, SlotDelta


class CommPoly:
    """Polynomial over a fixed tuple of commuting variable names."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        clean = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def constant(cls, vars, c) -> "CommPoly":
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): Fraction(c)})

    @classmethod
    def variable(cls, vars, name) -> "CommPoly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): Fraction(1)})

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError("polynomials live over different variable tuples")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CommPoly.constant(self.vars, other)
        if not isinstance(other, CommPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CommPoly.constant(self.vars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return CommPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return CommPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CommPoly.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return CommPoly(self.vars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return CommPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = CommPoly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def degree_in(self, name) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def integrate(self, name, upper) -> "CommPoly":
        """Definite integral in one variable from 0 to ``upper`` (another
        variable name or an exact rational)."""
        i = self.vars.index(name)
        sym_upper = isinstance(upper, str)
        if sym_upper:
            k = self.vars.index(upper)
            if k == i:
                raise ValueError("upper bound must differ from the integration variable")
        out = {}
        for e, c in self.terms.items():
            p = e[i] + 1
            c2 = c / p
            e2 = list(e)
            e2[i] = 0
            if sym_upper:
                e2[k] += p
            else:
                c2 *= Fraction(upper) ** p
            e2 = tuple(e2)
            out[e2] = out.get(e2, Fraction(0)) + c2
        return CommPoly(self.vars, out)

    def rename_onto(self, vars) -> "CommPoly":
        """Re-express over a superset variable tuple (dropped variables must
        be absent from every term)."""
        vars = tuple(vars)
        idx = []
        for j, v in enumerate(self.vars):
            if v in vars:
                idx.append((j, vars.index(v)))
            else:
                if any(e[j] for e in self.terms):
                    raise ValueError(f"variable {v!r} still occurs")
                idx.append((j, None))
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * len(vars)
            for j, tgt in idx:
                if tgt is not None:
                    e2[tgt] += e[j]
            e2 = tuple(e2)
            out[e2] = out.get(e2, Fraction(0)) + c
        return CommPoly(vars, out)

    def subs(self, values: dict) -> "CommPoly":
        """Substitute rational values for some variables."""
        out = CommPoly(self.vars)
        for e, c in self.terms.items():
            e2 = list(e)
            for name, val in values.items():
                i = self.vars.index(name)
                c *= Fraction(val) ** e2[i]
                e2[i] = 0
            term = CommPoly(self.vars, {tuple(e2): c})
            out = out + term
        return out

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial (all variables eliminated)."""
        for e, c in self.terms.items():
            if any(e):
                raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])),
        )

    def __repr__(self):
        return f"CommPoly({format_commpoly(self)})"


def format_commpoly(p: CommPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        facs = []
        for name, k in zip(p.vars, e):
            if k == 1:
                facs.append(name)
            elif k > 1:
                facs.append(f"{name}^{k}")
        body = "*".join(facs)
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
    return " ".join(parts)


_LMUL_VAR = "Â"  # Â
_DELTA_VAR = "δ̂"  # δ̂


def hyper_vars(nslots: int):
    return (_LMUL_VAR,) + tuple(f"{_DELTA_VAR}{j}" for j in range(1, nslots + 1))


@dataclass(frozen=True)
class CommutingHyperPoly:
    """Hyperoperator written as a commuting polynomial in left
    multiplication and the per-slot inner derivations."""

    nslots: int
    poly: CommPoly

    @classmethod
    def from_poly(cls, nslots: int, poly: CommPoly) -> "CommutingHyperPoly":
        return cls(nslots, poly.rename_onto(hyper_vars(nslots)))

    def monomials(self):
        """Yield (coeff, a, (b1..bn)): left-multiplication power and slot
        derivation powers."""
        for e, c in self.poly.sorted_terms():
            yield c, e[0], tuple(e[1:])

    def to_hyper(self, base) -> HyperExpr:
        """Monomial-wise conversion: left multiplication becomes powers of
        ``base``; slot derivations become SlotDelta nodes (their base is the
        same operator, supplied again at application time)."""
        from .freealg import as_poly

        basep = as_poly(base)
        terms = []
        for c, a, bs in self.monomials():
            facs = []
            if a:
                facs.append(LeftMul(basep ** a))
            for j, b in enumerate(bs, start=1):
                facs.extend([SlotDelta(j)] * b)
            node = HyperProd(tuple(facs))
            terms.append(node if c == 1 else HyperScale(c, node))
        return HyperSum(tuple(terms))

    def pretty(self) -> str:
        return format_commpoly(self.poly)

    def __eq__(self, other):
        if not isinstance(other, CommutingHyperPoly):
            return NotImplemented
        return self.nslots == other.nslots and self.poly == other.poly
