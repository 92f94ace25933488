"""Recursive-descent parsers for scalar (Laurent series) and vector expressions.

Scalar grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*          # '/' only by rational constants
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INT)?               # negative powers only on z
    atom   := INT | 'z' | 'inv' '(' expr ',' INT ')' | '(' expr ')'

Vector grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := rational | 'a' '(' '-' INT ')' | 'E' '(' ['-'] INT ')' | 'vac' | 'omega'
            | NAME | '(' expr ')'

In a vector term the oscillators a(-n) act, right to left, on the last
vector-valued factor (``vac`` when there is none).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional

from .errors import CutoffExceeded, ParseError, UnknownSymbol
from .scalars import LaurentSeries, series_inverse
from .va_core import Vector

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class Token(NamedTuple):
    kind: str   # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(s: str) -> List[Token]:
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m.end() == pos or (m.group(0).strip() == "" and m.end() == len(s)):
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        elif m.group(3):
            if m.group(3) not in "+-*/^(),":
                raise ParseError(f"unexpected character {m.group(3)!r}", s, start)
            out.append(Token("op", m.group(3), start))
        pos = m.end()
    out.append(Token("end", "", len(s)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok: Optional[Token] = None):
        tok = tok or self.tok
        return ParseError(msg, self.text, tok.pos)

    def accept(self, text) -> Optional[Token]:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return t

    def integer(self, signed=False) -> int:
        neg = signed and self.accept("-") is not None
        if self.tok.kind != "int":
            raise self.error("expected an integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    def finish(self):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")


# ---------------------------------------------------------------------------
# scalars

class _ScalarParser(_Parser):
    def expr(self) -> LaurentSeries:
        val = self.term()
        while True:
            if self.accept("+"):
                val = val + self.term()
            elif self.accept("-"):
                val = val - self.term()
            else:
                return val

    def term(self) -> LaurentSeries:
        val = self.unary()
        while True:
            if self.accept("*"):
                val = val * self.unary()
            elif self.tok.text == "/" and self.tok.kind == "op":
                tok = self.tok
                self.i += 1
                d = self.unary()
                c = _as_constant(d)
                if c is None:
                    raise self.error("division is only allowed by a rational constant", tok)
                if c == 0:
                    raise ZeroDivisionError(f"division by zero at position {tok.pos}: {self.text!r}")
                val = val.scale(1 / c)
            else:
                return val

    def unary(self) -> LaurentSeries:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> LaurentSeries:
        tok = self.tok
        base, is_z = self.atom()
        if self.accept("^"):
            k = self.integer(signed=True)
            if is_z:
                return LaurentSeries.monomial(k)
            if k < 0:
                raise self.error("negative powers are only allowed on z (use inv)", tok)
            out = LaurentSeries.constant(1)
            for _ in range(k):
                out = out * base
            return out
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return LaurentSeries.constant(int(tok.text)), False
        if tok.kind == "name":
            if tok.text == "z":
                self.i += 1
                return LaurentSeries.monomial(1), True
            if tok.text == "inv":
                self.i += 1
                self.expect("(")
                p = self.expr()
                self.expect(",")
                order_tok = self.tok
                order = self.integer()
                self.expect(")")
                if order == 0:
                    raise self.error("inv needs a positive order", order_tok)
                if p.is_zero():
                    raise ZeroDivisionError(f"inv of a zero series at position {tok.pos}: {self.text!r}")
                return series_inverse(p, order), False
            raise UnknownSymbol(f"unknown symbol {tok.text!r} at position {tok.pos}: {self.text!r}")
        if self.accept("("):
            val = self.expr()
            self.expect(")")
            return val, False
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def _as_constant(f: LaurentSeries) -> Optional[Fraction]:
    if not f.is_exact:
        return None
    if not f.coeffs:
        return Fraction(0)
    if set(f.coeffs) == {0}:
        return f.coeffs[0]
    return None


def parse_scalar_expr(s: str) -> LaurentSeries:
    """Parse e.g. ``"3*z^-2 + 1/2*z"`` or ``"inv(1+z, 5)"`` into a LaurentSeries."""
    p = _ScalarParser(s)
    if p.tok.kind == "end":
        raise p.error("empty expression")
    val = p.expr()
    p.finish()
    return val


# ---------------------------------------------------------------------------
# vectors

class _VectorParser(_Parser):
    def __init__(self, text, V, names: Mapping[str, Vector]):
        super().__init__(text)
        self.V = V
        self.names = names

    def expr(self) -> Vector:
        sign = -1 if self.accept("-") else 1
        val = self.term() * sign
        while True:
            if self.accept("+"):
                val = val + self.term()
            elif self.accept("-"):
                val = val - self.term()
            else:
                return val

    def rational(self) -> Fraction:
        num = self.integer()
        if self.accept("/"):
            tok = self.tok
            den = self.integer()
            if den == 0:
                raise self.error("zero denominator", tok)
            return Fraction(num, den)
        return Fraction(num)

    def term(self) -> Vector:
        scalar = Fraction(1)
        oscillators = []   # (mode, token)
        base: Optional[Vector] = None
        while True:
            tok = self.tok
            if tok.kind == "int":
                scalar *= self.rational()
            elif tok.kind == "name" and tok.text == "a" and self.toks[self.i + 1].text == "(":
                if base is not None:
                    raise self.error("oscillators must precede the state they act on")
                self.i += 1
                self.expect("(")
                n_tok = self.tok
                n = self.integer(signed=True)
                self.expect(")")
                if n >= 0:
                    raise self.error("only creation modes a(-n), n >= 1, are allowed", n_tok)
                oscillators.append((n, tok))
            elif tok.kind == "name" or tok.text == "(":
                if base is not None:
                    raise self.error("a term may contain only one state")
                base = self.state()
            else:
                found = tok.text or "end of input"
                raise self.error(f"unexpected {found!r}")
            if not self.accept("*"):
                break
        vec = self.V.vac() if base is None else base
        for n, tok in reversed(oscillators):
            vec = self.V.alpha_vec(n, vec)
        for lab in vec:
            if self.V.weight(lab) > self.V.cutoff:
                raise CutoffExceeded(f"state of weight {self.V.weight(lab)} above cutoff {self.V.cutoff} "
                                     f"at position {self.toks[0].pos}: {self.text!r}")
        return vec * scalar

    def state(self) -> Vector:
        tok = self.tok
        if self.accept("("):
            val = self.expr()
            self.expect(")")
            return val
        self.i += 1
        name = tok.text
        if name == "vac":
            return self.V.vac()
        if name == "omega":
            if self.V.conformal_vector is None:
                raise UnknownSymbol(f"{self.V.name} has no conformal vector (position {tok.pos})")
            return Vector(self.V.conformal_vector)
        if name == "E" and self.tok.text == "(":
            if not hasattr(self.V, "sector_range"):
                raise UnknownSymbol(f"E(m) is not defined on {self.V.name} (position {tok.pos}): {self.text!r}")
            self.expect("(")
            m_tok = self.tok
            m = self.integer(signed=True)
            self.expect(")")
            if self.V.k * m * m > self.V.cutoff:
                raise CutoffExceeded(f"E({m}) lies above the cutoff (position {m_tok.pos}): {self.text!r}")
            return self.V.basis_vector(self.V.state((), m))
        if name in self.names:
            return Vector(self.names[name])
        raise UnknownSymbol(f"unknown symbol {name!r} at position {tok.pos}: {self.text!r}")


def parse_vector_expr(s: str, V, names: Optional[Mapping[str, Vector]] = None) -> Vector:
    """Parse e.g. ``"1/2*a(-1)*a(-1)*vac + E(1)"`` into a Vector of ``V``."""
    p = _VectorParser(s, V, names or {})
    if p.tok.kind == "end":
        raise p.error("empty expression")
    val = p.expr()
    p.finish()
    return val
