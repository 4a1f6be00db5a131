"""Closed-form function expressions in one variable ``t``.

Grammar (lowest to highest binding)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 't' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

``FUNC`` is one of sin, cos, exp, log, sqrt, abs.  Exponents must be
constant (free of ``t``).  Trees are immutable and evaluation is vectorised
over numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

__all__ = [
    "BinOp", "Call", "Const", "DomainError", "ExprAst", "ExprError",
    "LexError", "Neg", "NotDifferentiableError", "Num", "ParseError",
    "UnknownIdentifierError", "Var", "compile_expr", "differentiate",
    "evaluate", "is_constant", "parse", "substitute", "to_string",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExprError(ValueError):
    """Base class for expression errors."""


class LexError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    pass


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain (log of non-positive, division by zero...)."""


class NotDifferentiableError(ExprError):
    pass


# --------------------------------------------------------------------------
# Tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str

    @property
    def value(self) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExprAst"


ExprAst = Union[Num, Const, Var, Neg, BinOp, Call]


def is_constant(node: ExprAst) -> bool:
    """True when ``node`` does not reference ``t``."""
    if isinstance(node, Var):
        return False
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    return is_constant(node.arg)


# --------------------------------------------------------------------------
# Lexer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, op, end
    text: str
    pos: int  # 1-based


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None or m.end() == i:
            raise LexError(f"unexpected character {source[i]!r}", i + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start + 1))
        i = m.end()
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        self.advance()

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ExprAst:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            pos = self.advance().pos
            exponent = self.unary()
            if not is_constant(exponent):
                raise ParseError("exponent must not depend on t", pos)
            return BinOp("^", base, exponent)
        return base

    def atom(self) -> ExprAst:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise LexError(f"number {tok.text!r} overflows", tok.pos)
            return Num(value)
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return Var()
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"missing operand, found {found!r}", tok.pos)


def parse(source: str) -> ExprAst:
    """Parse ``source`` into an expression tree.

    >>> evaluate(parse("2 + 3*t^2"), 2.0)
    14.0
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 1)
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# Printing

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 5


def _prec(node: ExprAst) -> int:
    if isinstance(node, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL}.get(node.op, 4)
    if isinstance(node, Neg):
        return _PREC_UNARY
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _PREC_UNARY
    return _PREC_ATOM


def _wrap(node: ExprAst, min_prec: int) -> str:
    s = to_string(node)
    return s if _prec(node) >= min_prec else f"({s})"


def to_string(node: ExprAst) -> str:
    """Render a tree as text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _PREC_UNARY)
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if node.op in "+-":
        return f"{_wrap(node.left, _PREC_ADD)} {node.op} {_wrap(node.right, _PREC_MUL)}"
    if node.op in "*/":
        return f"{_wrap(node.left, _PREC_MUL)}{node.op}{_wrap(node.right, _PREC_UNARY)}"
    return f"{_wrap(node.left, _PREC_ATOM)}^{_wrap(node.right, _PREC_UNARY)}"


# --------------------------------------------------------------------------
# Evaluation

Evaluator = Callable[[np.ndarray], np.ndarray]


def _constant_value(node: ExprAst) -> float:
    with np.errstate(all="ignore"):
        value = float(compile_expr(node)(np.zeros(1))[0])
    return value


def _check(bad, x: np.ndarray, what: str) -> None:
    if np.any(bad):
        mask = np.broadcast_to(bad, np.shape(x)).ravel()
        where = np.asarray(x, dtype=float).ravel()[np.flatnonzero(mask)[0]]
        raise DomainError(f"{what} at t={where:.17g}")


def _build(node: ExprAst) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, (Num, Const)):
        value = float(node.value)
        return lambda x: value
    if isinstance(node, Var):
        return lambda x: x
    if isinstance(node, Neg):
        inner = _build(node.arg)
        return lambda x: -inner(x)
    if isinstance(node, Call):
        inner = _build(node.arg)
        name = node.func
        if name == "sin":
            return lambda x: np.sin(inner(x))
        if name == "cos":
            return lambda x: np.cos(inner(x))
        if name == "abs":
            return lambda x: np.abs(inner(x))
        if name == "exp":
            def _exp(x):
                out = np.exp(inner(x))
                _check(np.isinf(out), x, "exp overflow")
                return out
            return _exp
        if name == "log":
            def _log(x):
                u = inner(x)
                _check(u <= 0, x, "log of non-positive value")
                return np.log(u)
            return _log
        if name == "sqrt":
            def _sqrt(x):
                u = inner(x)
                _check(u < 0, x, "sqrt of negative value")
                return np.sqrt(u)
            return _sqrt
        raise AssertionError(name)

    left = _build(node.left)
    if node.op == "^":
        c = _constant_value(node.right)
        if not math.isfinite(c):
            raise DomainError("non-finite exponent")
        integral = c == int(c)

        def _pow(x):
            u = left(x)
            if c < 0:
                _check(u == 0, x, "zero raised to a negative power")
            if not integral:
                _check(u < 0, x, "negative base with non-integer exponent")
            return np.power(u, c)
        return _pow

    right = _build(node.right)
    if node.op == "+":
        return lambda x: left(x) + right(x)
    if node.op == "-":
        return lambda x: left(x) - right(x)
    if node.op == "*":
        return lambda x: left(x) * right(x)

    def _div(x):
        den = right(x)
        _check(den == 0, x, "division by zero")
        return left(x) / den
    return _div


@lru_cache(maxsize=4096)
def compile_expr(node: ExprAst) -> Evaluator:
    """Return a vectorised evaluator ``x -> values`` for ``node``.

    The evaluator raises :class:`DomainError` instead of producing NaN or inf.
    """
    body = _build(node)

    def evaluator(x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            out = np.asarray(body(x), dtype=float)
        if out is x:
            out = out.copy()
        if out.shape != np.shape(x):
            out = np.broadcast_to(out, np.shape(x)).copy()
        if not np.all(np.isfinite(out)):
            _check(~np.isfinite(out), x, "non-finite value")
        return out

    return evaluator


def evaluate(node: ExprAst, t):
    """Evaluate at a scalar (returns float) or an array (returns ndarray)."""
    if np.ndim(t) == 0:
        t = float(t)
        if not math.isfinite(t):
            raise DomainError(f"non-finite argument t={t}")
        return float(compile_expr(node)(np.array([t]))[0])
    return compile_expr(node)(np.asarray(t, dtype=float))


# --------------------------------------------------------------------------
# Differentiation

_ZERO = Num(0.0)
_ONE = Num(1.0)


def _num(node: ExprAst, value: float) -> bool:
    return isinstance(node, Num) and node.value == value


def _neg(u: ExprAst) -> ExprAst:
    if isinstance(u, Num):
        return Num(-u.value)
    if isinstance(u, Neg):
        return u.arg
    return Neg(u)


def _add(u: ExprAst, v: ExprAst) -> ExprAst:
    if _num(u, 0):
        return v
    if _num(v, 0):
        return u
    if isinstance(u, Num) and isinstance(v, Num):
        return Num(u.value + v.value)
    return BinOp("+", u, v)


def _sub(u: ExprAst, v: ExprAst) -> ExprAst:
    if _num(v, 0):
        return u
    if _num(u, 0):
        return _neg(v)
    if isinstance(u, Num) and isinstance(v, Num):
        return Num(u.value - v.value)
    return BinOp("-", u, v)


def _mul(u: ExprAst, v: ExprAst) -> ExprAst:
    if _num(u, 0) or _num(v, 0):
        return _ZERO
    if _num(u, 1):
        return v
    if _num(v, 1):
        return u
    if isinstance(u, Num) and isinstance(v, Num):
        return Num(u.value * v.value)
    return BinOp("*", u, v)


def _div(u: ExprAst, v: ExprAst) -> ExprAst:
    if _num(u, 0):
        return _ZERO
    if _num(v, 1):
        return u
    return BinOp("/", u, v)


def _pow(u: ExprAst, c: float) -> ExprAst:
    if c == 0:
        return _ONE
    if c == 1:
        return u
    return BinOp("^", u, Num(c))


def differentiate(node: ExprAst) -> ExprAst:
    """Exact derivative with respect to ``t``.

    ``abs`` has no symbolic derivative; callers fall back to finite
    differences when this raises :class:`NotDifferentiableError`.
    """
    if is_constant(node):
        return _ZERO
    if isinstance(node, Var):
        return _ONE
    if isinstance(node, Neg):
        return _neg(differentiate(node.arg))
    if isinstance(node, Call):
        u = node.arg
        du = differentiate(u)
        if node.func == "sin":
            return _mul(Call("cos", u), du)
        if node.func == "cos":
            return _mul(_neg(Call("sin", u)), du)
        if node.func == "exp":
            return _mul(node, du)
        if node.func == "log":
            return _div(du, u)
        if node.func == "sqrt":
            return _div(du, _mul(Num(2.0), node))
        raise NotDifferentiableError(
            f"{node.func}() has no symbolic derivative; use finite differences"
        )
    u, v = node.left, node.right
    if node.op == "^":
        c = _constant_value(v)
        return _mul(_mul(Num(c), _pow(u, c - 1.0)), differentiate(u))
    du, dv = differentiate(u), differentiate(v)
    if node.op == "+":
        return _add(du, dv)
    if node.op == "-":
        return _sub(du, dv)
    if node.op == "*":
        return _add(_mul(du, v), _mul(u, dv))
    return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, 2.0))


def substitute(node: ExprAst, replacement: ExprAst) -> ExprAst:
    """Replace every occurrence of ``t`` in ``node`` by ``replacement``."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, (Num, Const)):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacement))
    return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
