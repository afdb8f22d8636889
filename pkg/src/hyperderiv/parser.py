"""Expression grammar for free-algebra polynomials.

Grammar (UTF-8 text):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' nat)*
    atom   := rational | identifier | 'sym' '(' id ',' id ',' nat ',' nat ')'
            | '(' expr ')'
    rational   := digits ['/' digits]
    identifier := [A-Za-z][A-Za-z0-9_]*

Printing uses the canonical graded-lexicographic term order so that
parse(format_poly(p)) == p for every polynomial.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ExprSyntaxError
from .freealg import NcPoly, sym_product

_SYM_BUILTIN = "sym"


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("eof", "", self.pos)
        ch = self.text[self.pos]
        start = self.pos
        if ch in "+-*^(),":
            return ("op", ch, start)
        if ch.isdigit():
            j = start
            while j < len(self.text) and self.text[j].isdigit():
                j += 1
            return ("nat", self.text[start:j], start)
        if ch.isalpha():
            j = start
            while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
                j += 1
            return ("ident", self.text[start:j], start)
        raise ExprSyntaxError(f"unexpected character {ch!r}", start, self.text)

    def next(self):
        tok = self.peek()
        self.pos = tok[2] + len(tok[1])
        return tok

    def expect(self, kind, value=None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ExprSyntaxError(f"expected {want!r}, got {tok[1] or 'end of input'!r}",
                                  tok[2], self.text)
        return tok


class _Parser:
    def __init__(self, text: str):
        self.tk = _Tokenizer(text)

    def parse(self) -> NcPoly:
        p = self._expr()
        tok = self.tk.peek()
        if tok[0] != "eof":
            raise ExprSyntaxError(f"unexpected trailing input {tok[1]!r}", tok[2], self.tk.text)
        return p

    def _expr(self) -> NcPoly:
        sign = 1
        tok = self.tk.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.tk.next()
            sign = -1 if tok[1] == "-" else 1
        acc = self._term() * sign
        while True:
            tok = self.tk.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.tk.next()
                t = self._term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def _term(self) -> NcPoly:
        acc = self._factor()
        while True:
            tok = self.tk.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.tk.next()
                acc = acc * self._factor()
            else:
                return acc

    def _factor(self) -> NcPoly:
        acc = self._atom()
        while True:
            tok = self.tk.peek()
            if tok[0] == "op" and tok[1] == "^":
                self.tk.next()
                acc = acc ** self._nat()
            else:
                return acc

    def _nat(self) -> int:
        tok = self.tk.expect("nat")
        return int(tok[1])

    def _atom(self) -> NcPoly:
        tok = self.tk.next()
        if tok[0] == "nat":
            num = int(tok[1])
            # rational continuation p/q binds at the character level (no spaces)
            if self.tk.pos < len(self.tk.text) and self.tk.text[self.tk.pos] == "/":
                self.tk.pos += 1
                den = self.tk.expect("nat")
                return NcPoly.scalar(Fraction(num, int(den[1])))
            return NcPoly.scalar(num)
        if tok[0] == "ident":
            if tok[1] == _SYM_BUILTIN:
                nxt = self.tk.peek()
                if nxt[0] == "op" and nxt[1] == "(":
                    return self._sym_call()
            return NcPoly.symbol(tok[1])
        if tok[0] == "op" and tok[1] == "(":
            p = self._expr()
            self.tk.expect("op", ")")
            return p
        if tok[0] == "op" and tok[1] == "-":
            return -self._factor()
        raise ExprSyntaxError(
            f"expected a term, got {tok[1] or 'end of input'!r}", tok[2], self.tk.text
        )

    def _sym_call(self) -> NcPoly:
        self.tk.expect("op", "(")
        x = self.tk.expect("ident")[1]
        self.tk.expect("op", ",")
        y = self.tk.expect("ident")[1]
        self.tk.expect("op", ",")
        m = self._nat()
        self.tk.expect("op", ",")
        n = self._nat()
        self.tk.expect("op", ")")
        return sym_product(x, y, m, n)


def parse(text: str) -> NcPoly:
    """Parse expression text into a canonical NcPoly."""
    return _Parser(text).parse()


def format_coeff(c: Fraction) -> str:
    return str(c)


def format_poly(p: NcPoly) -> str:
    """Canonical text form: graded-lexicographic term order, letters joined
    with '*', no power compression."""
    if p.is_zero():
        return "0"
    parts = []
    for w, c in p.sorted_terms():
        body = "*".join(w)
        mag = abs(c)
        if not w:
            piece = format_coeff(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{format_coeff(mag)}*{body}"
        if not parts:
            parts.append(piece if c > 0 else f"-{piece}")
        else:
            parts.append(f"+ {piece}" if c > 0 else f"- {piece}")
    return " ".join(parts)
