"""Arithmetic expressions in the single variable ``t``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | sqrt | abs

``-t^2`` parses as ``-(t^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ExpressionError

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
    "abs": abs,
}
CONSTANTS = {"pi": math.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {value!r}, found {found}", pos, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {val!r}", pos, self.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "t":
                return Var()
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ExpressionError(f"unknown identifier {val!r}", pos, self.text)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {found}", pos, self.text)


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an AST; raises :class:`ExpressionError` with position."""
    return _Parser(text).parse()


def uses_variable(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return uses_variable(node.operand)
    if isinstance(node, Call):
        return uses_variable(node.arg)
    return uses_variable(node.left) or uses_variable(node.right)


def compile_expression(node: Node) -> Callable[[float], float]:
    """Turn an AST into a plain closure ``f(t) -> float``."""
    if isinstance(node, Num):
        value = node.value
        return lambda t: value
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        inner = compile_expression(node.operand)
        return lambda t: -inner(t)
    if isinstance(node, Call):
        fn = FUNCTIONS[node.func]
        inner = compile_expression(node.arg)
        return lambda t: fn(inner(t))
    lhs = compile_expression(node.left)
    rhs = compile_expression(node.right)
    if node.op == "+":
        return lambda t: lhs(t) + rhs(t)
    if node.op == "-":
        return lambda t: lhs(t) - rhs(t)
    if node.op == "*":
        return lambda t: lhs(t) * rhs(t)
    if node.op == "/":
        return lambda t: lhs(t) / rhs(t)
    return lambda t: lhs(t) ** rhs(t)


def evaluate(text: str, t: float = 0.0) -> float:
    """Evaluate an expression string at ``t``; handy for ``pi``-style CLI values."""
    try:
        return float(compile_expression(parse_expression(text))(t))
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        if isinstance(exc, ExpressionError):
            raise
        raise ExpressionError(f"cannot evaluate {text!r}: {exc}") from exc


def _fmt(x: float) -> str:
    return format(x, ".17g")


def to_text(node: Node) -> str:
    """Fully parenthesized source text for ``node``; reparses to the same function."""
    if isinstance(node, Num):
        return _fmt(node.value) if node.value >= 0 else f"(-{_fmt(-node.value)})"
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"


def substitute(node: Node, replacement: Node) -> Node:
    """Replace every occurrence of ``t`` by ``replacement``."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Num):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacement))
    return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
