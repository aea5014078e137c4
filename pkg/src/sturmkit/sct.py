"""Verdicts on Sturm's comparison theorem for a pair of potentials.

SCT fails on ``[a, b]`` exactly when ``v'' + q2 v = 0`` is disconjugate there,
so the verdict is decided by the conjugate-point test on ``q2``; direction
sweeps over all solutions corroborate it and feed the diagnostics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InternalConsistencyError, PreconditionError
from .oscillate import (
    DEFAULT_TOL,
    SWEEP_DIRECTIONS,
    Lift,
    first_conjugate_point,
    is_disconjugate,
    locate_zeros,
    sweep_counts,
    zero_free_direction,
)
from .potential import (
    PI,
    Interval,
    PiecewisePotential,
    build_delta_construction,
    build_large_M_construction,
)
from .propagate import IVP, fundamental

COMPARE_GRID = 10_000


def consecutive_zeros(q1: PiecewisePotential, tol: float = DEFAULT_TOL) -> tuple[float, float] | None:
    """First two zeros of ``u(a) = 0, u'(a) = 1`` on the domain of ``q1``, if there are two."""
    b = first_conjugate_point(q1, q1.a, q1.b, tol)
    return None if b is None else (q1.a, b)


def compare_pointwise(q1: PiecewisePotential, q2: PiecewisePotential, interval: Interval) -> tuple[bool, bool]:
    """``(q1 <= q2 everywhere, q1 > q2 everywhere)`` on the closed interval.

    Exact piece by piece when both potentials are piecewise constant; otherwise
    checked on the union of breakpoints and a uniform grid.
    """
    a, b = interval.a, interval.b
    cuts = sorted({a, b} | {t for t in q1.breakpoints + q2.breakpoints if a < t < b})
    if q1.is_piecewise_constant and q2.is_piecewise_constant:
        # one sample per cell decides it; b is sampled separately since it may open a new piece
        points = [0.5 * (l + r) for l, r in zip(cuts, cuts[1:])] + cuts
    else:
        points = sorted(set(np.linspace(a, b, COMPARE_GRID).tolist()) | set(cuts))
    diffs = np.array([q2(t) - q1(t) for t in points])
    return bool(np.all(diffs >= 0.0)), bool(np.all(diffs < 0.0))


@dataclass(frozen=True)
class SctVerdict:
    outcome: str  # "holds" | "fails" | "not-applicable"
    interval: Interval | None
    u_zeros: tuple[float, float] | None
    disconjugate: bool | None
    witness_theta: float | None = None
    min_sweep_zeros: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def witness(self):
        """Zero-free angle when SCT fails, minimal swept zero count when it holds."""
        return self.witness_theta if self.outcome == "fails" else self.min_sweep_zeros

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "a": None if self.interval is None else self.interval.a,
            "b": None if self.interval is None else self.interval.b,
            "witness_theta": self.witness_theta,
            "disconjugate": self.disconjugate,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def sct_verdict(q1: PiecewisePotential, q2: PiecewisePotential, interval: Interval | None = None,
                tol: float = DEFAULT_TOL, sweep: int = SWEEP_DIRECTIONS) -> SctVerdict:
    if (q1.a, q1.b) != (q2.a, q2.b):
        raise DomainError(f"potentials live on different domains [{q1.a}, {q1.b}] and [{q2.a}, {q2.b}]")
    u_zeros = consecutive_zeros(q1, tol)
    if u_zeros is None:
        return SctVerdict("not-applicable", interval, None, None,
                          diagnostics={"reason": "q1 is disconjugate on its domain; no solution has two zeros"})
    if interval is None:
        interval = Interval(*u_zeros)
    elif not interval.within(q1.domain):
        raise DomainError(f"interval [{interval.a}, {interval.b}] not inside [{q1.a}, {q1.b}]")
    nxt = first_conjugate_point(q1, interval.a, q1.b, tol)
    le, gt = compare_pointwise(q1, q2, interval)
    diagnostics = {
        "u_consecutive_at_ends": nxt is not None and abs(nxt - interval.b) <= 1e-10 * max(1.0, abs(interval.b)),
        "q1_le_q2": le,
        "q1_gt_q2": gt,
        "sweep_directions": sweep,
    }
    disconjugate = is_disconjugate(q2, interval, tol)
    closed = sweep_counts(q2, interval, sweep, tol)
    interior = sweep_counts(q2, interval, sweep, tol, open_interval=True)
    diagnostics["sweep_min_zeros"] = int(closed.min())
    diagnostics["sweep_min_interior_zeros"] = int(interior.min())
    diagnostics["all_zeros_interior"] = bool(interior.min() >= 1)
    if disconjugate:
        theta = zero_free_direction(q2, interval, tol)
        lift = Lift(fundamental(q2, interval.a, interval.b, tol), np.array([[math.cos(theta)], [math.sin(theta)]]))
        if int(lift.count(interval.a, interval.b)[0]) != 0:
            raise InternalConsistencyError(f"witness direction {theta} has zeros")
        return SctVerdict("fails", interval, (interval.a, interval.b), True, witness_theta=theta,
                          min_sweep_zeros=int(closed.min()), diagnostics=diagnostics)
    if closed.min() < 1:
        raise InternalConsistencyError("conjugate point exists but a swept direction is zero-free")
    return SctVerdict("holds", interval, (interval.a, interval.b), False,
                      min_sweep_zeros=int(closed.min()), diagnostics=diagnostics)


def check_lemma2(q1: PiecewisePotential, q2: PiecewisePotential, I: Interval,
                 tol: float = DEFAULT_TOL, sweep: int = SWEEP_DIRECTIONS) -> bool:
    """Where ``q1 > q2`` on ``I`` and ``u`` has no interior zero there, no solution for ``q2`` has two zeros in ``I``."""
    if not I.within(q1.domain) or not I.within(q2.domain):
        raise DomainError(f"I = [{I.a}, {I.b}] not inside both domains")
    u_zeros = consecutive_zeros(q1, tol)
    if u_zeros is None:
        raise PreconditionError("no-comparison-solution", "q1 has no solution with two zeros")
    u = Lift(fundamental(q1, q1.a, q1.b, tol), np.array([[0.0], [1.0]]))
    if int(u.count_open(I.a, I.b)[0]) > 0:
        raise PreconditionError("u-interior-zero", f"u vanishes inside ({I.a}, {I.b})")
    _, gt = compare_pointwise(q1, q2, I)
    if not gt:
        raise PreconditionError("q1-not-greater", f"q1 > q2 does not hold on [{I.a}, {I.b}]")
    return bool(sweep_counts(q2, I, sweep, tol).max() <= 1)


@dataclass(frozen=True)
class ConstructionReport:
    kind: str  # "delta" | "large-M"
    epsilon: float | None
    delta: float | None
    level: float
    J: Interval
    q1_le_q2: bool
    verdict: SctVerdict
    min_interior_zeros: int
    min_zeros_in_J: int
    expected_zeros: tuple[float, ...] = ()
    located_zeros: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "level": self.level,
            "J": [self.J.a, self.J.b],
            "q1_le_q2": self.q1_le_q2,
            "outcome": self.verdict.outcome,
            "min_interior_zeros": self.min_interior_zeros,
            "min_zeros_in_J": self.min_zeros_in_J,
            "expected_zeros": list(self.expected_zeros),
            "located_zeros": list(self.located_zeros),
        }


def _construction_report(kind, eps, delta, q1, q2, J, tol, expected=()):
    domain = q1.domain
    verdict = sct_verdict(q1, q2, domain, tol)
    interior = sweep_counts(q2, domain, tol=tol, open_interval=True)
    in_J = sweep_counts(q2, J, tol=tol)
    located = ()
    if expected:
        zeros = locate_zeros(IVP(q2, q2.a, 1.0, 0.0), domain, tol).zeros
        located = tuple(zeros[: len(expected)])
    le, _ = compare_pointwise(q1, q2, domain)
    return ConstructionReport(kind, eps, delta, q2.pieces[0].value, J, le, verdict,
                              int(interior.min()), int(in_J.min()), tuple(expected), located)


def large_M_report(q1: PiecewisePotential, J: Interval, tol: float = DEFAULT_TOL) -> ConstructionReport:
    """SCT holds for ``q2 = M`` although only a zero inside ``J`` is forced."""
    M, q2 = build_large_M_construction(q1, J)
    return _construction_report("large-M", None, None, q1, q2, J, tol)


def converse_counterexample(eps: float, tol: float = DEFAULT_TOL) -> list[ConstructionReport]:
    """Both SCT-holds constructions for ``J = [0, eps]``: the constant ``1/delta^2`` and the large-M one.

    The large-M instance is the one refuting the expected converse: SCT holds
    while only the behaviour on ``J`` was used to choose ``q2``.
    """
    delta, q2 = build_delta_construction(eps)
    q1 = PiecewisePotential.constant(1.0)
    J = Interval(0.0, eps)
    expected = (PI * delta / 2.0, 3.0 * PI * delta / 2.0)
    return [
        _construction_report("delta", eps, delta, q1, q2, J, tol, expected),
        large_M_report(q1, J, tol),
    ]
