"""Hyperoperators: linear maps on free-algebra polynomials.

A hyperoperator is an expression tree over the primitive nodes

    LeftMul(p)         v -> p*v
    Delta(x)           v -> x*v - v*x           (inner derivation)
    SlotDelta(j)       slot j operand Q -> [base, Q]
    PartialDelta(f, j) slot j operand Q -> [f, Q]

combined by Sum, Prod (composition, rightmost factor applied first) and
Scale. Application to a slot product threads placeholder letters through
the tree, so slot-level and whole-operand nodes mix freely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArityMismatch
from .freealg import NcPoly, as_poly, sym_decompose, sym_name, sym_product


class HyperExpr:
    """Base node; subclasses are immutable."""

    def __add__(self, other):
        return HyperSum((self, _as_hyper(other)))

    def __sub__(self, other):
        return HyperSum((self, HyperScale(Fraction(-1), _as_hyper(other))))

    def __neg__(self):
        return HyperScale(Fraction(-1), self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HyperScale(Fraction(other), self)
        return HyperProd((self, _as_hyper(other)))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HyperScale(Fraction(other), self)
        return HyperProd((_as_hyper(other), self))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("hyperoperators have no inverse here")
        return HyperProd((self,) * n)

    def arity(self) -> int:
        """Largest slot index referenced (0 when no slot nodes appear)."""
        return max(_slot_indices(self), default=0)


def _as_hyper(x) -> HyperExpr:
    if isinstance(x, HyperExpr):
        return x
    raise TypeError(f"cannot combine {type(x).__name__} with HyperExpr")


@dataclass(frozen=True)
class LeftMul(HyperExpr):
    p: NcPoly


@dataclass(frozen=True)
class Delta(HyperExpr):
    x: NcPoly


@dataclass(frozen=True)
class SlotDelta(HyperExpr):
    j: int


@dataclass(frozen=True)
class PartialDelta(HyperExpr):
    f: NcPoly
    j: int


@dataclass(frozen=True)
class HyperSum(HyperExpr):
    terms: tuple


@dataclass(frozen=True)
class HyperProd(HyperExpr):
    factors: tuple


@dataclass(frozen=True)
class HyperScale(HyperExpr):
    c: Fraction
    h: HyperExpr


def hyper_identity() -> HyperExpr:
    return HyperProd(())


def hyper_zero() -> HyperExpr:
    return HyperSum(())


def _slot_indices(h: HyperExpr):
    if isinstance(h, SlotDelta):
        yield h.j
    elif isinstance(h, PartialDelta):
        yield h.j
    elif isinstance(h, HyperSum):
        for t in h.terms:
            yield from _slot_indices(t)
    elif isinstance(h, HyperProd):
        for f in h.factors:
            yield from _slot_indices(f)
    elif isinstance(h, HyperScale):
        yield from _slot_indices(h.h)


@dataclass(frozen=True)
class SlotProduct:
    """Ordered operands that a hyperoperator's slots bind to."""

    slots: tuple

    def __len__(self):
        return len(self.slots)

    @classmethod
    def of(cls, *operands) -> "SlotProduct":
        return cls(tuple(as_poly(x) for x in operands))


_PLACEHOLDER = "$slot{j}"


def _commutator_at_placeholder(state: NcPoly, f: NcPoly, placeholder: str) -> NcPoly:
    s = NcPoly.symbol(placeholder)
    return state.replace_one(placeholder, f * s) - state.replace_one(placeholder, s * f)


def _eval(h: HyperExpr, state: NcPoly, base, names) -> NcPoly:
    if isinstance(h, LeftMul):
        return h.p * state
    if isinstance(h, Delta):
        return h.x * state - state * h.x
    if isinstance(h, SlotDelta):
        if base is None:
            raise ValueError("SlotDelta needs the designated base operator of the expression")
        return _commutator_at_placeholder(state, base, names[h.j - 1])
    if isinstance(h, PartialDelta):
        return _commutator_at_placeholder(state, h.f, names[h.j - 1])
    if isinstance(h, HyperSum):
        out = NcPoly.zero()
        for t in h.terms:
            out = out + _eval(t, state, base, names)
        return out
    if isinstance(h, HyperProd):
        for f in reversed(h.factors):
            state = _eval(f, state, base, names)
        return state
    if isinstance(h, HyperScale):
        return _eval(h.h, state, base, names) * h.c
    raise TypeError(f"not a hyperoperator node: {type(h).__name__}")


def apply_hyper(h: HyperExpr, slots, base=None) -> NcPoly:
    """Apply a hyperoperator to a slot product (a single operand is a
    1-slot product). ``base`` is the operator that SlotDelta nodes commute
    against."""
    if isinstance(slots, SlotProduct):
        operands = [as_poly(q) for q in slots.slots]
    else:
        operands = [as_poly(q) for q in slots]
    n = len(operands)
    need = h.arity()
    if need > n:
        raise ArityMismatch(f"expression references slot {need}, only {n} operand(s) given")
    if base is not None:
        base = as_poly(base)
    names = [_PLACEHOLDER.format(j=j + 1) for j in range(n)]
    state = NcPoly.word(names)
    state = _eval(h, state, base, names)
    for name, q in zip(names, operands):
        state = state.substitute(name, q)
    return state


def inner_derivation(x, p) -> NcPoly:
    """[x, p] = x*p - p*x."""
    x, p = as_poly(x), as_poly(p)
    return x * p - p * x


def delta_arrow(a, b, p: NcPoly) -> NcPoly:
    """Degree-shift hyperoperator on the symmetrized domain: the symmetrized
    (m, n) product maps to the (m-1, n+1) one, and to 0 when m = 0."""
    out = NcPoly.zero()
    for m, n, c in sym_decompose(as_poly(p), a, b):
        if m >= 1:
            out = out + sym_product(a, b, m - 1, n + 1) * c
    return out


def d_arrow(a, b, p) -> NcPoly:
    """Derivation replacing one occurrence of the letter a by b at a time."""
    return as_poly(p).replace_one(a, NcPoly.symbol(b))


def _ordered_positions(word, names, start=0):
    if not names:
        yield ()
        return
    for i in range(start, len(word)):
        if word[i] == names[0]:
            for rest in _ordered_positions(word, names[1:], i + 1):
                yield (i,) + rest


def ordered_differential(js, p: NcPoly, variables) -> NcPoly:
    """Terms of the iterated partial differential whose differentials appear
    in the prescribed left-to-right order.

    ``js`` lists variable symbols; ``variables`` maps each variable to its
    differential letter as (A_j, dA_j) pairs.
    """
    dmap = {sym_name(a): sym_name(da) for a, da in variables}
    names = [sym_name(j) for j in js]
    for nm in names:
        if nm not in dmap:
            raise ValueError(f"no differential registered for variable {nm!r}")
    out = {}
    for w, c in as_poly(p).terms.items():
        for positions in _ordered_positions(w, names):
            nw = list(w)
            for pos, nm in zip(positions, names):
                nw[pos] = dmap[nm]
            key = tuple(nw)
            out[key] = out.get(key, Fraction(0)) + c
    return NcPoly(out)


class Slot:
    """Marker standing for an unbound operand in a rearrangeable product."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SLOT"


SLOT = Slot()


def _strip_markers(factors):
    items = list(factors)
    if items and items[0] is SLOT:
        if len(items) % 2:
            raise ValueError("alternating form must pair every slot with a polynomial")
        fs = []
        for i, x in enumerate(items):
            if i % 2 == 0:
                if x is not SLOT:
                    raise ValueError("even positions of the alternating form must be SLOT")
            else:
                fs.append(as_poly(x))
        return fs
    return [as_poly(x) for x in items]


def _is_central(f: NcPoly) -> bool:
    # commutator with a scalar multiple of the identity is the zero map
    return all(not w for w in f.terms)


def _divisions(j: int, n: int):
    """Consecutive-block divisions of (j, ..., n): lists of (a, b) with the
    block covering a..b-1."""
    if j > n:
        yield []
        return
    inner = range(j + 1, n + 1)
    for r in range(len(inner) + 1):
        for cuts in itertools.combinations(inner, r):
            bounds = [j, *cuts, n + 1]
            yield [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def _prod_range(fs, a, b) -> NcPoly:
    out = NcPoly.one()
    for k in range(a, b):
        out = out * fs[k - 1]
    return out


def rearrange(factors) -> HyperExpr:
    """Rewrite the alternating product slot*f1*slot*f2*...*slot*fn as a
    hyperoperator with all slots moved to the right.

    Accepts either the f-polynomials alone or the alternating
    [SLOT, f1, SLOT, f2, ...] form. Applying the result to the slot
    operands reproduces the original product.
    """
    fs = _strip_markers(factors)
    n = len(fs)
    if n < 1:
        raise ValueError("need at least one factor")
    terms = []
    for j in range(n + 1, 0, -1):
        prefix = _prod_range(fs, 1, j)
        if prefix.is_zero():
            continue
        for blocks in _divisions(j, n):
            facs = []
            if prefix != NcPoly.one():
                facs.append(LeftMul(prefix))
            dead = False
            for a, b in blocks:
                fprod = _prod_range(fs, a, b)
                if _is_central(fprod):
                    dead = True
                    break
                facs.append(PartialDelta(fprod, a))
            if dead:
                continue
            sign = Fraction(-1) ** len(blocks)
            term = HyperProd(tuple(facs))
            terms.append(term if sign == 1 else HyperScale(sign, term))
    return HyperSum(tuple(terms))


def flatten(h: HyperExpr):
    """Normal form: list of (coefficient, primitive-factor tuple), sums and
    scales distributed, like terms merged, zero terms dropped. Factor order
    inside a product is preserved (composition order)."""
    def go(node):
        if isinstance(node, (LeftMul, Delta, SlotDelta, PartialDelta)):
            return [(Fraction(1), (node,))]
        if isinstance(node, HyperScale):
            return [(node.c * c, f) for c, f in go(node.h)]
        if isinstance(node, HyperSum):
            out = []
            for t in node.terms:
                out.extend(go(t))
            return out
        if isinstance(node, HyperProd):
            acc = [(Fraction(1), ())]
            for f in node.factors:
                acc = [(c1 * c2, f1 + f2) for c1, f1 in acc for c2, f2 in go(f)]
            return acc
        raise TypeError(f"not a hyperoperator node: {type(node).__name__}")

    merged = {}
    for c, facs in go(h):
        merged[facs] = merged.get(facs, Fraction(0)) + c
    return [(c, facs) for facs, c in merged.items() if c]


# serialization

def hyper_to_obj(h: HyperExpr):
    if isinstance(h, LeftMul):
        return {"lmul": h.p.to_obj()}
    if isinstance(h, Delta):
        return {"delta": h.x.to_obj()}
    if isinstance(h, SlotDelta):
        return {"slotdelta": h.j}
    if isinstance(h, PartialDelta):
        return {"pdelta": {"f": h.f.to_obj(), "j": h.j}}
    if isinstance(h, HyperSum):
        return {"sum": [hyper_to_obj(t) for t in h.terms]}
    if isinstance(h, HyperProd):
        return {"prod": [hyper_to_obj(f) for f in h.factors]}
    if isinstance(h, HyperScale):
        return {"scale": {"c": str(h.c), "h": hyper_to_obj(h.h)}}
    raise TypeError(f"not a hyperoperator node: {type(h).__name__}")


def hyper_from_obj(obj) -> HyperExpr:
    if "lmul" in obj:
        return LeftMul(NcPoly.from_obj(obj["lmul"]))
    if "delta" in obj:
        return Delta(NcPoly.from_obj(obj["delta"]))
    if "slotdelta" in obj:
        return SlotDelta(int(obj["slotdelta"]))
    if "pdelta" in obj:
        return PartialDelta(NcPoly.from_obj(obj["pdelta"]["f"]), int(obj["pdelta"]["j"]))
    if "sum" in obj:
        return HyperSum(tuple(hyper_from_obj(t) for t in obj["sum"]))
    if "prod" in obj:
        return HyperProd(tuple(hyper_from_obj(t) for t in obj["prod"]))
    if "scale" in obj:
        return HyperScale(Fraction(obj["scale"]["c"]), hyper_from_obj(obj["scale"]["h"]))
    raise ValueError(f"unknown hyperoperator node tags: {sorted(obj)}")
