"""Recursive-descent parser and evaluator for weight expressions in ``x``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' factor)?
    base   := number | 'x' | ident '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` while ``2^-1`` is ``2^(-1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

FUNCTIONS = {
    "exp": np.exp,
    "sqrt": np.sqrt,
    "acos": np.arccos,
    "cos": np.cos,
    "sin": np.sin,
    "abs": np.abs,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    """Syntax error in a weight expression; ``offset`` is the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class WeightDomainError(ArithmeticError):
    """Evaluation produced a non-finite value."""


class Node:
    def evaluate(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, x):
        return np.full(np.shape(x), self.value, dtype=float)


@dataclass(frozen=True)
class Var(Node):
    def evaluate(self, x):
        return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def evaluate(self, x):
        return -self.operand.evaluate(x)


@dataclass(frozen=True)
class BinOp(Node):
    left: Node
    right: Node


class Add(BinOp):
    def evaluate(self, x):
        return self.left.evaluate(x) + self.right.evaluate(x)


class Sub(BinOp):
    def evaluate(self, x):
        return self.left.evaluate(x) - self.right.evaluate(x)


class Mul(BinOp):
    def evaluate(self, x):
        return self.left.evaluate(x) * self.right.evaluate(x)


class Div(BinOp):
    def evaluate(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.left.evaluate(x) / self.right.evaluate(x)


class Pow(BinOp):
    def evaluate(self, x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.power(self.left.evaluate(x), self.right.evaluate(x))


@dataclass(frozen=True)
class Call(Node):
    name: str
    arg: Node

    def evaluate(self, x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return FUNCTIONS[self.name](self.arg.evaluate(x))


_BINOPS = {"+": Add, "-": Sub, "*": Mul, "/": Div}


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = self._tokenize(source)
        self.pos = 0

    @staticmethod
    def _tokenize(source):
        tokens = []
        i = 0
        while True:
            while i < len(source) and source[i].isspace():
                i += 1
            if i >= len(source):
                break
            m = _TOKEN.match(source, i)
            if m is None or m.end() == i:
                raise ParseError(f"unexpected character {source[i]!r}", _byte_offset(source, i))
            kind = m.lastgroup
            start = m.start(kind)
            tokens.append((kind, m.group(kind), _byte_offset(source, start)))
            i = m.end()
        tokens.append(("end", "", _byte_offset(source, len(source))))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        kind, value, offset = self.advance()
        if value != text or kind != "op":
            found = value or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", offset)

    def parse(self):
        node = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = _BINOPS[op](node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = _BINOPS[op](node, self.factor())
        return node

    def factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.factor())
        node = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            node = Pow(node, self.factor())
        return node

    def base(self):
        kind, value, offset = self.advance()
        if kind == "number":
            return Num(float(value))
        if kind == "ident":
            if value == "x":
                return Var()
            if value not in FUNCTIONS:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", offset)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(value, arg)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = value or "end of input"
        raise ParseError(f"unexpected token {found!r}", offset)


def _byte_offset(source, index):
    return len(source[:index].encode("utf-8"))


def parse_weight(source: str) -> Node:
    """Parse ``source`` into an expression tree over the variable ``x``."""
    return _Parser(source).parse()


def evaluate(tree: Node, x):
    """Evaluate ``tree`` at ``x`` (scalar or array); non-finite results raise."""
    values = tree.evaluate(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(values)):
        bad = np.asarray(x, dtype=float).ravel()[~np.isfinite(np.ravel(values))]
        raise WeightDomainError(f"weight is not finite at x = {bad[0]!r}")
    return values
