"""Piecewise potentials q(t) on a compact interval and the comparison constructions.

Piece ``i`` owns ``[left, right)``; the last piece also owns its right end, so
``q`` is right-continuous at every interior breakpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from .errors import DomainError, ExpressionError, PotentialError

PI = math.pi
SUP_GRID = 10_000


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise DomainError(f"interval needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, t: float) -> bool:
        return self.a <= t <= self.b

    def within(self, other: "Interval") -> bool:
        return other.a <= self.a and self.b <= other.b

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``"a,b"`` where each end may be an expression such as ``pi/2``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise DomainError(f"interval must look like 'a,b', got {text!r}")
        return cls(_expr.evaluate(parts[0]), _expr.evaluate(parts[1]))


@dataclass(frozen=True)
class Piece:
    left: float
    right: float
    value: float | None = None
    expr: str | None = None
    _fn: Callable[[float], float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.left < self.right:
            raise PotentialError(f"empty piece [{self.left}, {self.right})")
        if (self.value is None) == (self.expr is None):
            raise PotentialError("a piece needs exactly one of a constant value or an expression")
        if self.value is not None:
            object.__setattr__(self, "value", float(self.value))
            if not math.isfinite(self.value):
                raise PotentialError(f"non-finite constant level {self.value}")
        else:
            node = _expr.parse_expression(self.expr)
            object.__setattr__(self, "_fn", _expr.compile_expression(node))

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    def __call__(self, t: float) -> float:
        if self.value is not None:
            return self.value
        try:
            return float(self._fn(t))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ExpressionError(f"expression {self.expr!r} undefined at t={t}: {exc}") from exc

    @property
    def length(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class PiecewisePotential:
    a: float
    b: float
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.a < self.b:
            raise PotentialError(f"domain needs a < b, got [{self.a}, {self.b}]")
        if not self.pieces:
            raise PotentialError("a potential needs at least one piece")
        if self.pieces[0].left != self.a:
            raise PotentialError(f"first piece starts at {self.pieces[0].left}, domain at {self.a}")
        for prev, nxt in zip(self.pieces, self.pieces[1:]):
            if prev.right < nxt.left:
                raise PotentialError(f"gap between {prev.right} and {nxt.left}")
            if prev.right > nxt.left:
                raise PotentialError(f"overlap between {nxt.left} and {prev.right}")
        if self.pieces[-1].right != self.b:
            raise PotentialError(f"last piece ends at {self.pieces[-1].right}, domain at {self.b}")

    @classmethod
    def constant(cls, value: float, a: float = 0.0, b: float = PI) -> "PiecewisePotential":
        return cls(a, b, (Piece(a, b, value=value),))

    @classmethod
    def steps(cls, breaks: Sequence[float], levels: Sequence[float]) -> "PiecewisePotential":
        """Piecewise constant potential; ``breaks`` has one more entry than ``levels``."""
        if len(breaks) != len(levels) + 1:
            raise PotentialError("need len(breaks) == len(levels) + 1")
        pieces = tuple(Piece(l, r, value=c) for l, r, c in zip(breaks, breaks[1:], levels))
        return cls(breaks[0], breaks[-1], pieces)

    @property
    def domain(self) -> Interval:
        return Interval(self.a, self.b)

    @property
    def is_piecewise_constant(self) -> bool:
        return all(p.is_constant for p in self.pieces)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.a,) + tuple(p.right for p in self.pieces)

    def piece_index(self, t: float) -> int:
        if not self.a <= t <= self.b:
            raise DomainError(f"t={t} outside [{self.a}, {self.b}]")
        for i, p in enumerate(self.pieces):
            if t < p.right:
                return i
        return len(self.pieces) - 1

    def __call__(self, t: float) -> float:
        return self.pieces[self.piece_index(t)](t)

    def pieces_over(self, t0: float, t1: float) -> list[Piece]:
        """Pieces with a nonempty overlap with ``[t0, t1]`` (``t0 < t1``)."""
        return [p for p in self.pieces if p.right > t0 and p.left < t1]

    def sup_abs(self, interval: Interval | None = None) -> float:
        """sup |q| over ``interval``: exact for constant pieces, grid plus breakpoints otherwise."""
        lo, hi = (self.a, self.b) if interval is None else (interval.a, interval.b)
        best = 0.0
        for p in self.pieces_over(lo, hi) if lo < hi else [self.pieces[self.piece_index(lo)]]:
            if p.is_constant:
                best = max(best, abs(p.value))
            else:
                l, r = max(p.left, lo), min(p.right, hi)
                ts = np.linspace(l, r, max(2, int(SUP_GRID * (r - l) / (hi - lo)) + 1))
                best = max(best, max(abs(p(float(t))) for t in ts))
        return best

    def to_spec(self) -> str:
        return serialize_potential(self)


def eval_potential(q: PiecewisePotential, t: float) -> float:
    return q(t)


# --- spec file format -------------------------------------------------------


def _number(value, what: str) -> float:
    if isinstance(value, bool):
        raise PotentialError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return _expr.evaluate(value)
    raise PotentialError(f"{what}: expected a number, got {value!r}")


def parse_potential_spec(text: str) -> PiecewisePotential:
    """Build a potential from the JSON spec format.

    ``{"a": 0, "b": 3.14, "pieces": [{"to": 1, "const": 1}, {"to": "b", "expr": "t^2"}]}``

    Numbers may also be given as strings in the expression grammar (``"pi/2"``).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PotentialError(f"not valid JSON: {exc.msg} at position {exc.pos}") from exc
    if not isinstance(doc, dict):
        raise PotentialError("potential spec must be a JSON object")
    unknown = set(doc) - {"a", "b", "pieces"}
    if unknown:
        raise PotentialError(f"unknown keys {sorted(unknown)}")
    for key in ("a", "b", "pieces"):
        if key not in doc:
            raise PotentialError(f"missing key {key!r}")
    a = _number(doc["a"], "a")
    b = _number(doc["b"], "b")
    raw = doc["pieces"]
    if not isinstance(raw, list) or not raw:
        raise PotentialError("'pieces' must be a non-empty array")
    pieces = []
    left = a
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "to" not in item:
            raise PotentialError(f"piece {i}: must be an object with a 'to' key")
        extra = set(item) - {"to", "const", "expr"}
        if extra:
            raise PotentialError(f"piece {i}: unknown keys {sorted(extra)}")
        if ("const" in item) == ("expr" in item):
            raise PotentialError(f"piece {i}: exactly one of 'const' or 'expr' is required")
        right = b if item["to"] == "b" else _number(item["to"], f"piece {i} 'to'")
        if right < left:
            raise PotentialError(f"piece {i}: overlaps previous piece ({right} < {left})")
        if right == left:
            raise PotentialError(f"piece {i}: empty piece at {left}")
        if "const" in item:
            pieces.append(Piece(left, right, value=_number(item["const"], f"piece {i} 'const'")))
        else:
            if not isinstance(item["expr"], str):
                raise PotentialError(f"piece {i}: 'expr' must be a string")
            pieces.append(Piece(left, right, expr=item["expr"]))
        left = right
    if left != b:
        raise PotentialError(f"pieces end at {left}, leaving a gap before b = {b}")
    return PiecewisePotential(a, b, tuple(pieces))


def serialize_potential(q: PiecewisePotential) -> str:
    parts = []
    for i, p in enumerate(q.pieces):
        to = '"b"' if i == len(q.pieces) - 1 else _fmt(p.right)
        body = f'"const": {_fmt(p.value)}' if p.is_constant else f'"expr": {json.dumps(p.expr)}'
        parts.append(f'{{"to": {to}, {body}}}')
    return f'{{"a": {_fmt(q.a)}, "b": {_fmt(q.b)}, "pieces": [{", ".join(parts)}]}}\n'


# --- constructions ----------------------------------------------------------


def build_theorem1_q2(eps: float) -> PiecewisePotential:
    """Level 1 on ``[0, pi - eps)`` and ``(1 - eps)^2`` on ``[pi - eps, pi]``."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
    return PiecewisePotential.steps([0.0, PI - eps, PI], [1.0, (1.0 - eps) ** 2])


def build_delta_construction(eps: float) -> tuple[float, PiecewisePotential]:
    """delta = min(1, 2 eps / (3 pi)) / 2 and q2 = 1/delta^2 on [0, pi]."""
    if not 0.0 < eps < PI:
        raise DomainError(f"epsilon must lie in (0, pi), got {eps}")
    delta = 0.5 * min(1.0, 2.0 * eps / (3.0 * PI))
    return delta, PiecewisePotential.constant(1.0 / delta**2)


def build_large_M_construction(q1: PiecewisePotential, J: Interval) -> tuple[float, PiecewisePotential]:
    """Constant level M >= sup|q1| whose solutions have zero spacing at most |J|/2."""
    if not J.within(q1.domain):
        raise DomainError(f"J = [{J.a}, {J.b}] is not inside [{q1.a}, {q1.b}]")
    M = max(q1.sup_abs(), (2.0 * PI / J.length) ** 2)
    return M, PiecewisePotential.constant(M, q1.a, q1.b)


def rescale_to_standard(q: PiecewisePotential) -> PiecewisePotential:
    """Map ``q`` on ``[a, b]`` to ``[0, pi]`` via ``t = a + (b - a) s / pi``.

    The new potential is ``k^2 q(a + k s)`` with ``k = (b - a) / pi``, so that
    ``w(s) = v(a + k s)`` solves the rescaled equation whenever ``v`` solves the
    original one.
    """
    k = (q.b - q.a) / PI
    if k == 1.0 and q.a == 0.0:
        return q

    def to_s(t: float) -> float:
        return (t - q.a) / k

    breaks = [0.0] + [to_s(p.right) for p in q.pieces[:-1]] + [PI]
    pieces = []
    for p, l, r in zip(q.pieces, breaks, breaks[1:]):
        if p.is_constant:
            pieces.append(Piece(l, r, value=k * k * p.value))
        else:
            inner = _expr.BinOp("+", _expr.Num(q.a), _expr.BinOp("*", _expr.Num(k), _expr.Var()))
            node = _expr.BinOp("*", _expr.Num(k * k), _expr.substitute(_expr.parse_expression(p.expr), inner))
            pieces.append(Piece(l, r, expr=_expr.to_text(node)))
    return PiecewisePotential(0.0, PI, tuple(pieces))
