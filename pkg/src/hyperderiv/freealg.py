"""Exact arithmetic in the free algebra over noncommuting symbols.

Words are tuples of symbol names; a polynomial maps words to exact
rational coefficients. The empty word is the identity operator. The
canonical term order is graded lexicographic, which fixes printing,
serialization and iteration order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotInSymDomain

Word = tuple  # tuple of symbol names


@dataclass(frozen=True)
class Symbol:
    """A noncommuting letter; ``kind`` tags differentials for bookkeeping only."""

    name: str
    kind: str = "operator"

    def __post_init__(self):
        if self.kind not in ("operator", "differential"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")


def sym_name(x) -> str:
    """Accept a Symbol or a bare name string."""
    return x.name if isinstance(x, Symbol) else str(x)


def word_key(w: Word):
    return (len(w), w)


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be exact rational, got {type(c).__name__}")


class NcPoly:
    """Linear combination of words with exact rational coefficients.

    Immutable by convention: no method mutates ``self``; zero terms are
    never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for w, c in terms.items():
                c = _coeff(c)
                if c:
                    clean[tuple(w)] = c
        object.__setattr__(self, "terms", clean)

    # constructors
    @classmethod
    def zero(cls) -> "NcPoly":
        return cls()

    @classmethod
    def one(cls) -> "NcPoly":
        return cls({(): Fraction(1)})

    @classmethod
    def scalar(cls, c) -> "NcPoly":
        return cls({(): _coeff(c)})

    @classmethod
    def symbol(cls, x) -> "NcPoly":
        return cls({(sym_name(x),): Fraction(1)})

    @classmethod
    def word(cls, letters, coeff=1) -> "NcPoly":
        return cls({tuple(sym_name(x) for x in letters): _coeff(coeff)})

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=-1)

    def letters(self) -> set:
        out = set()
        for w in self.terms:
            out.update(w)
        return out

    def coefficient(self, word) -> Fraction:
        return self.terms.get(tuple(word), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def sorted_terms(self):
        """Terms in graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    # arithmetic
    def __add__(self, other) -> "NcPoly":
        other = _as_poly(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return NcPoly(out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self) -> "NcPoly":
        return NcPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "NcPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction)):
            c = _coeff(other)
            return NcPoly({w: c * v for w, v in self.terms.items()})
        other = _as_poly(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, Fraction(0)) + c1 * c2
        return NcPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return _as_poly(other).__mul__(self)

    def __truediv__(self, other):
        return self * (Fraction(1) / _coeff(other))

    def __pow__(self, n: int) -> "NcPoly":
        if n < 0:
            raise ValueError("negative powers are not defined in the free algebra")
        out = NcPoly.one()
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = NcPoly.scalar(other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        from .parser import format_poly

        return f"NcPoly({format_poly(self)})"

    # structure
    def truncated(self, max_degree: int) -> "NcPoly":
        return NcPoly({w: c for w, c in self.terms.items() if len(w) <= max_degree})

    def substitute(self, name, replacement: "NcPoly") -> "NcPoly":
        """Homomorphic substitution: every occurrence of the letter becomes ``replacement``."""
        name = sym_name(name)
        out = NcPoly.zero()
        for w, c in self.terms.items():
            factor = NcPoly.scalar(c)
            for letter in w:
                factor = factor * (replacement if letter == name else NcPoly.symbol(letter))
            out = out + factor
        return out

    def replace_one(self, name, image: "NcPoly") -> "NcPoly":
        """Derivation-style substitution: replace one occurrence of the letter
        at a time and sum the results."""
        name = sym_name(name)
        out = {}
        for w, c in self.terms.items():
            for i, letter in enumerate(w):
                if letter != name:
                    continue
                for iw, ic in image.terms.items():
                    nw = w[:i] + iw + w[i + 1 :]
                    out[nw] = out.get(nw, Fraction(0)) + c * ic
        return NcPoly(out)

    def bidegree_components(self, x, y) -> dict:
        """Split into components keyed by (count of x, count of y) per word."""
        x, y = sym_name(x), sym_name(y)
        comps = {}
        for w, c in self.terms.items():
            key = (sum(1 for l in w if l == x), sum(1 for l in w if l == y))
            comps.setdefault(key, {})[w] = c
        return {k: NcPoly(v) for k, v in comps.items()}

    # serialization
    def to_obj(self):
        return {
            "terms": [
                {"word": list(w), "coeff": str(c)} for w, c in self.sorted_terms()
            ]
        }

    @classmethod
    def from_obj(cls, obj) -> "NcPoly":
        terms = {}
        for t in obj["terms"]:
            w = tuple(t["word"])
            terms[w] = terms.get(w, Fraction(0)) + Fraction(t["coeff"])
        return cls(terms)


def _as_poly(x) -> NcPoly:
    if isinstance(x, NcPoly):
        return x
    if isinstance(x, (Symbol, str)):
        return NcPoly.symbol(x)
    if isinstance(x, (int, Fraction)):
        return NcPoly.scalar(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to NcPoly")


def as_poly(x) -> NcPoly:
    """Public coercion: NcPoly, Symbol, symbol name, int or Fraction."""
    return _as_poly(x)


def poly_mul(p: NcPoly, q: NcPoly) -> NcPoly:
    """Bilinear extension of word concatenation."""
    return _as_poly(p) * _as_poly(q)


def sym_product(x, y, m: int, n: int) -> NcPoly:
    """Symmetrized product: the sum of all words with m letters x and n
    letters y, each with coefficient 1 (binomial(m+n, n) words)."""
    if m < 0 or n < 0:
        raise ValueError("degrees must be non-negative")
    x, y = sym_name(x), sym_name(y)
    terms = {}
    for ypos in itertools.combinations(range(m + n), n):
        w = [x] * (m + n)
        for i in ypos:
            w[i] = y
        terms[tuple(w)] = Fraction(1)
    return NcPoly(terms)


def sym_product_oracle(x, y, m: int, n: int) -> NcPoly:
    """Independent route to the symmetrized product: expand (x + t*y)^(m+n)
    with a commuting parameter t and take the degree-n coefficient."""
    if m < 0 or n < 0:
        raise ValueError("degrees must be non-negative")
    x, y = sym_name(x), sym_name(y)
    # by_tdeg[k] = coefficient of t^k, an NcPoly; degrees above n are dropped
    by_tdeg = [NcPoly.one()] + [NcPoly.zero()] * n
    px, py = NcPoly.symbol(x), NcPoly.symbol(y)
    for _ in range(m + n):
        nxt = [NcPoly.zero()] * (n + 1)
        for k in range(n + 1):
            if by_tdeg[k].is_zero():
                continue
            nxt[k] = nxt[k] + by_tdeg[k] * px
            if k + 1 <= n:
                nxt[k + 1] = nxt[k + 1] + by_tdeg[k] * py
        by_tdeg = nxt
    return by_tdeg[n]


def sym_decompose(p: NcPoly, x, y):
    """Express p as a rational combination of symmetrized products of x and y.

    Returns a list of (m, n, coefficient) sorted by (m+n, n). Raises
    NotInSymDomain when some bidegree component is not proportional to the
    corresponding symmetrized product (distinct bidegrees are linearly
    independent, so the decomposition is unique when it exists).
    """
    p = _as_poly(p)
    xn, yn = sym_name(x), sym_name(y)
    extra = p.letters() - {xn, yn}
    if extra:
        raise NotInSymDomain(
            f"polynomial contains letters {sorted(extra)} besides {xn!r}, {yn!r}"
        )
    out = []
    for (m, n), comp in sorted(p.bidegree_components(xn, yn).items()):
        basis = sym_product(xn, yn, m, n)
        first = next(iter(basis.terms))
        c = comp.coefficient(first)
        if comp != basis * c:
            raise NotInSymDomain(
                f"bidegree ({m},{n}) component is not a multiple of the symmetrized product"
            )
        out.append((m, n, c))
    out.sort(key=lambda t: (t[0] + t[1], t[1]))
    return out
