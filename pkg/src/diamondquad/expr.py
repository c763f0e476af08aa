"""Integrand expressions in two variables: parser, evaluator, printer.

Grammar::

    expr    := term { ("+"|"-") term } ;
    term    := unary { ("*"|"/") unary } ;
    unary   := "-" unary | power ;
    power   := primary [ "^" unary ] ;
    primary := NUMBER | "x" | "y" | "pi" | FUNC "(" expr ")" | "(" expr ")" ;
    FUNC    := "sin" | "cos" | "exp" | "abs" | "sqrt" ;

``^`` is right-associative and binds tighter than unary minus, so
``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``2^(-1)``.

Evaluation accepts either Python floats (evaluated with :mod:`math`) or
numpy arrays (evaluated elementwise with numpy ufuncs, which is what the
quadrature routines use).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Constant", "NamedConstant", "Variable", "Unary", "Binary", "Expression",
    "ParseError", "EvalDomainError",
    "parse", "evaluate", "free_variables", "to_source", "as_integrand",
    "parse_real",
]

FUNCTIONS = ("sin", "cos", "exp", "abs", "sqrt")
UNARY_OPS = ("negate",) + FUNCTIONS
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
_SYMBOL_TO_OP = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}
_OP_TO_SYMBOL = {v: k for k, v in _SYMBOL_TO_OP.items()}
_DIGITS = "0123456789"


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class NamedConstant:
    name: str = "pi"

    def __post_init__(self):
        if self.name != "pi":
            raise ValueError(f"unknown named constant {self.name!r}")


@dataclass(frozen=True)
class Variable:
    name: str  # "x" or "y"

    def __post_init__(self):
        if self.name not in ("x", "y"):
            raise ValueError(f"unknown variable {self.name!r}")


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Expression"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary op {self.op!r}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {self.op!r}")


Expression = Union[Constant, NamedConstant, Variable, Unary, Binary]


class ParseError(ValueError):
    """Malformed expression text. ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.message = message
        self.offset = offset
        self.source = source
        super().__init__(f"{message} (at byte offset {offset})")


class EvalDomainError(ArithmeticError):
    """Evaluation left the real domain; ``kind`` names the failing node."""

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        super().__init__(message or f"domain error in {kind}")


# --------------------------------------------------------------------------
# Tokenizer / parser

@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "lparen", "rparen", "end"
    text: str
    pos: int  # character index


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
        elif c in _DIGITS:
            start = i
            while i < n and src[i] in _DIGITS:
                i += 1
            if i < n and src[i] == ".":
                i += 1
                if i >= n or src[i] not in _DIGITS:
                    raise _err(src, i, "malformed number: expected digits after '.'")
                while i < n and src[i] in _DIGITS:
                    i += 1
            if i < n and src[i] in "eE":
                i += 1
                if i < n and src[i] in "+-":
                    i += 1
                if i >= n or src[i] not in _DIGITS:
                    raise _err(src, i, "malformed number: expected exponent digits")
                while i < n and src[i] in _DIGITS:
                    i += 1
            if i < n and (src[i] == "." or src[i].isalnum() or src[i] == "_"):
                raise _err(src, i, "malformed number")
            tokens.append(_Token("num", src[start:i], start))
        elif "a" <= c <= "z" or "A" <= c <= "Z" or c == "_":
            start = i
            while i < n and (src[i].isascii() and (src[i].isalnum() or src[i] == "_")):
                i += 1
            tokens.append(_Token("ident", src[start:i], start))
        elif c in "+-*/^":
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("lparen", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, i))
            i += 1
        else:
            raise _err(src, i, f"unexpected character {c!r}")
    tokens.append(_Token("end", "", n))
    return tokens


def _err(src: str, pos: int, message: str) -> ParseError:
    return ParseError(message, len(src[:pos].encode("utf-8")), src)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, message: str, tok: _Token | None = None) -> ParseError:
        return _err(self.src, (tok or self.tok).pos, message)

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            if self.tok.kind == "rparen":
                raise self.fail("unbalanced parenthesis: unexpected ')'")
            raise self.fail(f"unexpected trailing token {self.tok.text!r}")
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = _SYMBOL_TO_OP[self.advance().text]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = _SYMBOL_TO_OP[self.advance().text]
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Unary("negate", self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return Binary("pow", base, self.unary())
        return base

    def primary(self) -> Expression:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise self.fail("number out of range", tok)
            return Constant(value)
        if tok.kind == "ident":
            self.advance()
            if tok.text in ("x", "y"):
                return Variable(tok.text)
            if tok.text == "pi":
                return NamedConstant("pi")
            if tok.text in FUNCTIONS:
                if self.tok.kind != "lparen":
                    raise self.fail(f"expected '(' after {tok.text}")
                self.advance()
                arg = self.expr()
                self.expect_rparen()
                return Unary(tok.text, arg)
            raise self.fail(f"unknown identifier {tok.text!r}", tok)
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect_rparen()
            return node
        if tok.kind == "end":
            raise self.fail("unexpected end of input")
        raise self.fail(f"unexpected token {tok.text!r}")

    def expect_rparen(self) -> None:
        if self.tok.kind != "rparen":
            if self.tok.kind == "end":
                raise self.fail("unbalanced parenthesis: missing ')'")
            raise self.fail(f"expected ')' but found {self.tok.text!r}")
        self.advance()


def parse(source: str) -> Expression:
    """Parse integrand text into an expression tree.

    Raises ParseError (with a byte offset) for anything outside the grammar.
    """
    if not isinstance(source, str):
        raise TypeError("source must be str")
    if not source.strip():
        raise ParseError("empty expression", len(source.encode("utf-8")), source)
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# Evaluation

_MATH_UNARY = {
    "negate": lambda v: -v,
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "abs": abs,
    "sqrt": math.sqrt,
}

_NP_UNARY = {
    "negate": np.negative,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sqrt": np.sqrt,
}


def _eval_scalar(node: Expression, x: float, y: float) -> float:
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Variable):
        return x if node.name == "x" else y
    if isinstance(node, NamedConstant):
        return math.pi
    if isinstance(node, Unary):
        v = _eval_scalar(node.child, x, y)
        if node.op == "sqrt" and v < 0:
            raise EvalDomainError("sqrt", f"sqrt of negative value {v!r}")
        try:
            r = _MATH_UNARY[node.op](v)
        except OverflowError:
            raise EvalDomainError(node.op, f"{node.op} overflowed") from None
        if not math.isfinite(r):
            raise EvalDomainError(node.op, f"{node.op} produced a non-finite value")
        return r
    a = _eval_scalar(node.left, x, y)
    b = _eval_scalar(node.right, x, y)
    op = node.op
    try:
        if op == "add":
            r = a + b
        elif op == "sub":
            r = a - b
        elif op == "mul":
            r = a * b
        elif op == "div":
            if b == 0:
                raise EvalDomainError("div", "division by zero")
            r = a / b
        else:
            if a < 0 and b != math.floor(b):
                raise EvalDomainError("pow", "negative base with non-integer exponent")
            if a == 0 and b < 0:
                raise EvalDomainError("pow", "zero raised to a negative power")
            r = a ** b
    except OverflowError:
        raise EvalDomainError(op, f"{op} overflowed") from None
    if not math.isfinite(r):
        raise EvalDomainError(op, f"{op} produced a non-finite value")
    return r


def _eval_array(node: Expression, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if isinstance(node, Constant):
        return np.full(x.shape, node.value)
    if isinstance(node, Variable):
        return x if node.name == "x" else y
    if isinstance(node, NamedConstant):
        return np.full(x.shape, math.pi)
    if isinstance(node, Unary):
        v = _eval_array(node.child, x, y)
        if node.op == "sqrt" and np.any(v < 0):
            raise EvalDomainError("sqrt", "sqrt of negative value")
        r = _NP_UNARY[node.op](v)
        if not np.all(np.isfinite(r)):
            raise EvalDomainError(node.op, f"{node.op} produced a non-finite value")
        return r
    a = _eval_array(node.left, x, y)
    b = _eval_array(node.right, x, y)
    op = node.op
    if op == "add":
        r = a + b
    elif op == "sub":
        r = a - b
    elif op == "mul":
        r = a * b
    elif op == "div":
        if np.any(b == 0):
            raise EvalDomainError("div", "division by zero")
        r = a / b
    else:
        if np.any((a < 0) & (b != np.floor(b))):
            raise EvalDomainError("pow", "negative base with non-integer exponent")
        if np.any((a == 0) & (b < 0)):
            raise EvalDomainError("pow", "zero raised to a negative power")
        r = np.power(a, b)
    if not np.all(np.isfinite(r)):
        raise EvalDomainError(op, f"{op} produced a non-finite value")
    return r


def evaluate(expr: Expression, x, y):
    """Evaluate ``expr`` at ``(x, y)``.

    Scalars give a float computed with :mod:`math`; arrays give an array of the
    broadcast shape computed with numpy. Any non-real or non-finite
    intermediate raises EvalDomainError naming the node kind.
    """
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return _eval_scalar(expr, float(x), float(y))
    xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    with np.errstate(all="ignore"):
        return _eval_array(expr, xa, ya)


def as_integrand(expr: Expression):
    """Wrap an expression as a vectorized ``f(x, y)`` for the quadrature engine."""

    def f(x, y):
        return evaluate(expr, x, y)

    f.expression = expr
    return f


def free_variables(expr: Expression) -> frozenset[str]:
    """Names of the variables (``"x"``, ``"y"``) that occur in ``expr``."""
    if isinstance(expr, Variable):
        return frozenset({expr.name})
    if isinstance(expr, Unary):
        return free_variables(expr.child)
    if isinstance(expr, Binary):
        return free_variables(expr.left) | free_variables(expr.right)
    return frozenset()


def to_source(expr: Expression) -> str:
    """Render ``expr`` as fully parenthesized text that parses back to the same tree."""
    if isinstance(expr, Constant):
        text = repr(float(expr.value))
        if text.startswith("-"):
            # not produced by parse; renders as negate(Constant)
            return f"(-{text[1:]})"
        return text
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, NamedConstant):
        return "pi"
    if isinstance(expr, Unary):
        if expr.op == "negate":
            return f"(-{to_source(expr.child)})"
        return f"{expr.op}({to_source(expr.child)})"
    return f"({to_source(expr.left)}{_OP_TO_SYMBOL[expr.op]}{to_source(expr.right)})"


def parse_real(text: str) -> float:
    """Parse a constant expression such as ``"pi"`` or ``"2*pi/3"`` to a float."""
    e = parse(text)
    if free_variables(e):
        raise ParseError("expected a constant, found a variable", 0, text)
    return evaluate(e, 0.0, 0.0)
