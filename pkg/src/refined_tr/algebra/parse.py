"""Recursive-descent parser for rational expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') ['-'] INT)?
    atom   := INT | NAME | '(' expr ')'

Errors carry 1-based line and column numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .poly import RatFunc

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + bad]!r}", line, col0 + pos + bad)
        start = m.start(m.lastindex)
        kind = ("int", "name", "op")[m.lastindex - 1]
        toks.append(_Tok(kind, m.group(m.lastindex), col0 + start))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text, line, col0, allowed):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.allowed = allowed

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect(self, text):
        t = self.peek()
        if t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.take()

    def parse(self) -> RatFunc:
        if self.peek().kind == "end":
            self.error("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    self.error("division by zero", op)
                v = v / rhs
        return v

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return -self.unary()
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text in ("^", "**"):
            op = self.take()
            sign = 1
            if self.peek().text == "-":
                self.take()
                sign = -1
            t = self.peek()
            if t.kind != "int":
                self.error("exponent must be an integer literal")
            self.take()
            e = sign * int(t.text)
            if e < 0 and base.is_zero():
                self.error("division by zero", op)
            return base ** e
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return RatFunc.constant(int(t.text))
        if t.kind == "name":
            self.take()
            if self.allowed is not None and t.text not in self.allowed:
                self.error(f"unknown symbol {t.text!r}", t)
            return RatFunc.var(t.text)
        if t.text == "(":
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        self.error(f"unexpected {t.text or 'end of input'!r}")


def parse_expr(text: str, *, allowed: Iterable[str] | None = None,
               line: int = 1, column: int = 1) -> RatFunc:
    """Parse a rational expression; ``column`` is where ``text`` starts."""
    allowed = set(allowed) if allowed is not None else None
    return _Parser(text, line, column, allowed).parse()


def parse_differential(text: str, markers: Iterable[str], *,
                       allowed: Iterable[str] | None = None) -> RatFunc:
    """Parse ``f*dz0*dz1`` style text and return the coefficient f.

    Each marker must occur exactly linearly in the numerator.
    """
    markers = list(markers)
    allowed_all = None if allowed is None else set(allowed) | set(markers)
    value = parse_expr(text, allowed=allowed_all)
    for m in markers:
        dn, dd = value.degree(m)
        if dd != 0 or dn != 1:
            raise ParseError(f"differential {m} must appear exactly once in the numerator")
        coeffs = value.coefficients(m)
        if not coeffs[0].is_zero():
            raise ParseError(f"term without differential {m}")
        value = coeffs[1]
    return value.compact()
