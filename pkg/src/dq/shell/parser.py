"""Recursive-descent parser for polynomial expressions.

Grammar (precedence ``^`` > unary ``-`` > ``*`` ``/`` > ``+`` ``-``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT | "^" "(" ["-"] INT ")")?
    atom   := INT | NAME | "(" expr ")"

Division is only accepted when the divisor lowers to a nonzero constant, so
the result always stays inside the polynomial ring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..symcore import I, Poly, Space

__all__ = ["ParseError", "Expr", "Num", "Sym", "Neg", "BinOp", "Pow", "parse_expr", "lower", "parse"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Expr:
    line: int
    column: int


@dataclass(frozen=True)
class Num(Expr):
    value: int


@dataclass(frozen=True)
class Sym(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    toks = []
    pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        if text[pos] == "\n":
            line += 1
            line_start = pos + 1
            pos += 1
            continue
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), line, start - line_start + 1))
        pos = m.end()
    toks.append(("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"{msg}, found {what}", tok[2], tok[3])

    def expect(self, value):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != value:
            self.error(f"expected {value!r}")
        return self.take()

    def parse(self) -> Expr:
        if self.peek()[0] == "eof":
            self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "eof":
            self.error("unexpected token")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            tok = self.take()
            left = BinOp(tok[2], tok[3], tok[1], left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            left = BinOp(tok[2], tok[3], tok[1], left, self.unary())
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(tok[2], tok[3], self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def _int_exponent(self) -> int:
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok[0] != "int":
            self.error("expected integer exponent")
        self.take()
        return sign * int(tok[1])

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                self.take()
                e = self._int_exponent()
                self.expect(")")
            else:
                e = self._int_exponent()
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                self.error("chained exponents need parentheses")
            return Pow(tok[2], tok[3], base, e)
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Num(tok[2], tok[3], int(tok[1]))
        if tok[0] == "name":
            self.take()
            return Sym(tok[2], tok[3], tok[1])
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected a number, a variable or '('")


def parse_expr(text: str) -> Expr:
    if not text or not text.strip():
        raise ParseError("empty expression", 1, 1)
    return _Parser(text).parse()


def _resolve(name: str, space: Space) -> int | None:
    if name in space.names:
        return space.index(name)
    # single-pair shorthand
    if space.kind == "pq" and space.n == 1 and name in ("p", "q"):
        return space.index(name + "1")
    if space.kind == "x" and name in ("x", "y", "z") and space.n == 3:
        return "xyz".index(name)
    return None


def lower(e: Expr, space: Space) -> Poly:
    """Exact lowering of an expression tree to a Poly on ``space``."""
    if isinstance(e, Num):
        return Poly.const(space, e.value)
    if isinstance(e, Sym):
        if e.name == "hbar":
            return Poly.hbar(space)
        if e.name == "i":
            return Poly.const(space, I)
        idx = _resolve(e.name, space)
        if idx is None:
            raise ParseError(f"unknown variable {e.name!r} for {space}", e.line, e.column)
        return Poly.var(space, idx)
    if isinstance(e, Neg):
        return -lower(e.arg, space)
    if isinstance(e, Pow):
        base = lower(e.base, space)
        if e.exponent >= 0:
            return base ** e.exponent
        if len(base.terms) != 1 or not base.is_constant():
            raise ParseError("negative exponent allowed only on hbar or constants times hbar",
                             e.line, e.column)
        ((key, c),) = base.terms.items()
        if key[-1] == 0:
            raise ParseError("negative exponent allowed only on hbar", e.line, e.column)
        n = -e.exponent
        return Poly(space, {key[:-1] + (key[-1] * e.exponent,): c.inverse() ** n})
    if isinstance(e, BinOp):
        a = lower(e.left, space)
        b = lower(e.right, space)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if len(b.terms) != 1 or not b.is_constant() or b.hbar_degree() != 0 or b.hbar_min() != 0:
                raise ParseError("division only by nonzero numeric constants", e.line, e.column)
            return a / b.constant_value()
    raise TypeError(f"unknown node {e!r}")


def parse(text: str, space: Space) -> Poly:
    return lower(parse_expr(text), space)
