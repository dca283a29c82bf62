"""Scalar expressions over the chart coordinates ``x, y, z``.

A small Pratt parser turns text such as ``"4*y^2*z^2 + 1"`` into an immutable
syntax tree.  Trees can be unparsed back to text (fully parenthesised, so the
round trip is structural) and evaluated either as plain floats or, through
:mod:`contactcurv.jet`, as truncated Taylor jets.

Operator precedence, loosest first: ``+ -``, ``* /``, unary ``-``, ``^``.
``^`` is right-associative; everything else associates to the left.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprError",
    "ParseError",
    "UnknownIdentifierError",
    "ArityError",
    "DomainError",
    "VARIABLES",
    "FUNCTIONS",
    "parse_expr",
    "unparse",
    "evaluate",
    "is_constant",
]

VARIABLES = ("x", "y", "z")
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    """Malformed expression text.  ``offset`` is a byte offset into the UTF-8 text."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} (at byte {offset})")


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


class DomainError(ExprError):
    """Evaluation left a function's domain; ``subexpr`` is the offending node."""

    def __init__(self, message: str, subexpr: "Expr"):
        self.subexpr = subexpr
        super().__init__(f"{message}: {unparse(subexpr)}")


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"

    def __str__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __str__(self) -> str:
        return unparse(self)


Expr = Union[Num, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text)
        tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


# --------------------------------------------------------------------------
# Pratt parser

_BINARY_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 25


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token, cls=ParseError):
        raise cls(message, tok.offset, self.text)

    def expect(self, op: str) -> _Token:
        tok = self.current
        if tok.kind != "op" or tok.text != op:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            self.error(f"expected {op!r}, found {found}", tok)
        return self.advance()

    def parse(self) -> Expr:
        expr = self.expression(0)
        if self.current.kind != "end":
            self.error(f"unexpected token {self.current.text!r}", self.current)
        return expr

    def expression(self, rbp: int) -> Expr:
        left = self.nud(self.advance())
        while True:
            tok = self.current
            lbp = _BINARY_BP.get(tok.text, 0) if tok.kind == "op" else 0
            if lbp <= rbp:
                return left
            self.advance()
            if tok.text == "^":
                right = self.expression(lbp - 1)
            else:
                right = self.expression(lbp)
            left = BinOp(tok.text, left, right)

    def nud(self, tok: _Token) -> Expr:
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            return self.name(tok)
        if tok.kind == "op":
            if tok.text == "(":
                inner = self.expression(0)
                self.expect(")")
                return inner
            if tok.text == "-":
                return Neg(self.expression(_UNARY_BP))
            if tok.text == "+":
                return self.expression(_UNARY_BP)
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {tok.text!r}", tok)

    def name(self, tok: _Token) -> Expr:
        if tok.text in VARIABLES:
            return Var(tok.text)
        if tok.text not in FUNCTIONS:
            self.error(f"unknown identifier {tok.text!r}", tok, UnknownIdentifierError)
        if not (self.current.kind == "op" and self.current.text == "("):
            self.error(f"function {tok.text!r} must be called with one argument", tok, ArityError)
        self.advance()
        if self.current.kind == "op" and self.current.text == ")":
            self.error(f"{tok.text}() takes exactly 1 argument (0 given)", tok, ArityError)
        args = [self.expression(0)]
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            args.append(self.expression(0))
        self.expect(")")
        if len(args) != 1:
            self.error(f"{tok.text}() takes exactly 1 argument ({len(args)} given)", tok, ArityError)
        return Call(tok.text, args[0])


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises :class:`ParseError` (or one of its subclasses) carrying the byte
    offset of the offending token.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", 0, text if isinstance(text, str) else "")
    return _Parser(text).parse()


def unparse(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{unparse(e.operand)})"
    if isinstance(e, BinOp):
        return f"({unparse(e.left)} {e.op} {unparse(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({unparse(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def is_constant(e: Expr) -> bool:
    if isinstance(e, Num):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return is_constant(e.operand)
    if isinstance(e, BinOp):
        return is_constant(e.left) and is_constant(e.right)
    return is_constant(e.arg)


def integer_exponent(e: Expr) -> int | None:
    """The exponent as an int when it is a literal (possibly negated) integer."""
    sign = 1
    while isinstance(e, Neg):
        sign = -sign
        e = e.operand
    if isinstance(e, Num) and float(e.value).is_integer() and abs(e.value) < 2**31:
        return sign * int(e.value)
    return None


def evaluate(e: Expr, p) -> float:
    """Plain float evaluation at the point ``p = (x, y, z)``."""
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Var):
        return float(p[VARIABLES.index(e.name)])
    if isinstance(e, Neg):
        return -evaluate(e.operand, p)
    if isinstance(e, BinOp):
        a = evaluate(e.left, p)
        if e.op == "^":
            n = integer_exponent(e.right)
            if n is not None:
                if a == 0.0 and n < 0:
                    raise DomainError("division by zero", e)
                return a**n
            b = evaluate(e.right, p)
            if a <= 0.0:
                raise DomainError("real power of a nonpositive base", e)
            return a**b
        b = evaluate(e.right, p)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError("division by zero", e)
        return a / b
    a = evaluate(e.arg, p)
    f = e.func
    if f == "log" and a <= 0.0:
        raise DomainError("log of a nonpositive value", e)
    if f == "sqrt" and a < 0.0:
        raise DomainError("sqrt of a negative value", e)
    if f == "abs":
        return abs(a)
    return getattr(math, f)(a)
