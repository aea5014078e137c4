"""Seeded random step potentials and the randomized invariant suites."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .oscillate import (
    check_interlacing,
    count_zeros,
    is_disconjugate,
    zero_free_direction,
)
from .potential import PI, Interval, PiecewisePotential
from .propagate import IVP, build_flow, propagate_exact, wronskian, State
from .sct import consecutive_zeros, sct_verdict
from .zero_motion import check_identity


def worker_count() -> int:
    """Thread cap from ``STURMKIT_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("STURMKIT_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


def _breaks(rng: np.random.Generator, a: float, b: float, max_pieces: int) -> list[float]:
    k = int(rng.integers(1, max_pieces + 1))
    inner = np.sort(rng.uniform(a, b, k - 1)) if k > 1 else np.array([])
    return [a, *inner.tolist(), b]


def random_step_potential(rng: np.random.Generator, a: float = 0.0, b: float = PI,
                          low: float = 0.05, high: float = 4.0, max_pieces: int = 4) -> PiecewisePotential:
    breaks = _breaks(rng, a, b, max_pieces)
    return PiecewisePotential.steps(breaks, rng.uniform(low, high, len(breaks) - 1).tolist())


def random_pair(rng: np.random.Generator, kind: str = "any",
                max_pieces: int = 4) -> tuple[PiecewisePotential, PiecewisePotential]:
    """Random step pair on ``[0, pi]`` whose ``q1 >= 1`` guarantees two zeros of ``u``.

    ``kind``: ``"any"`` (independent q2), ``"ordered"`` (q1 <= q2) or ``"gap"``
    (q1 >= q2 + 0.01 everywhere).
    """
    breaks = _breaks(rng, 0.0, PI, max_pieces)
    n = len(breaks) - 1
    lv1 = rng.uniform(1.0, 4.0, n)
    q1 = PiecewisePotential.steps(breaks, lv1.tolist())
    if kind == "any":
        return q1, random_step_potential(rng, max_pieces=max_pieces)
    if kind == "ordered":
        return q1, PiecewisePotential.steps(breaks, (lv1 + rng.uniform(0.0, 3.0, n)).tolist())
    if kind == "gap":
        return q1, PiecewisePotential.steps(breaks, (lv1 - rng.uniform(0.01, 2.0, n)).tolist())
    raise ValueError(f"unknown pair kind {kind!r}")


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    failed: int

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _equivalence_case(pair) -> bool:
    q1, q2 = pair
    verdict = sct_verdict(q1, q2)
    if verdict.outcome == "not-applicable":
        return consecutive_zeros(q1) is None
    return (verdict.outcome == "fails") == is_disconjugate(q2, verdict.interval)


def _classic_case(pair) -> bool:
    q1, q2 = pair
    verdict = sct_verdict(q1, q2)
    return verdict.outcome == "holds" and check_interlacing(q2, verdict.interval)


def _gap_case(pair) -> bool:
    q1, q2 = pair
    return sct_verdict(q1, q2).outcome == "fails"


def _linearity_case(args) -> bool:
    q, ic1, ic2, alpha, beta = args
    s1 = propagate_exact(IVP(q, q.a, *ic1), q.b)
    s2 = propagate_exact(IVP(q, q.a, *ic2), q.b)
    v0, dv0 = alpha * ic1[0] + beta * ic2[0], alpha * ic1[1] + beta * ic2[1]
    s = propagate_exact(IVP(q, q.a, v0, dv0), q.b)
    scale = max(1.0, abs(s1.v), abs(s2.v), abs(s1.dv), abs(s2.dv)) * max(1.0, abs(alpha), abs(beta))
    return (abs(s.v - alpha * s1.v - beta * s2.v) <= 1e-12 * scale
            and abs(s.dv - alpha * s1.dv - beta * s2.dv) <= 1e-12 * scale)


def _scaling_case(args) -> bool:
    q, theta = args
    base = count_zeros(IVP(q, q.a, math.cos(theta), math.sin(theta)), q.domain)
    return all(count_zeros(IVP(q, q.a, c * math.cos(theta), c * math.sin(theta)), q.domain) == base
               for c in (-2.0, 0.5, 10.0))


def _wronskian_case(q) -> bool:
    flow = build_flow(q, q.a, q.b, np.eye(2), method="exact")
    ws = []
    for t in np.linspace(q.a, q.b, 101):
        Y = flow.at(float(t))
        ws.append(wronskian(State(t, Y[0, 0], Y[1, 0]), State(t, Y[0, 1], Y[1, 1])))
    return max(abs(w - 1.0) for w in ws) <= 1e-12 * max(1.0, float(np.abs(flow.segments[-1].states).max()))


def _identity_case(args) -> bool:
    q, lam = args
    r = check_identity(q, lam)
    return r is None or r < 1e-8


def _monotone_case(args) -> bool:
    q, lo, hi = args
    outer = Interval(q.a, q.b)
    inner = Interval(lo, hi)
    return not is_disconjugate(q, outer) or is_disconjugate(q, inner)


def _witness_case(args) -> bool:
    q, interval = args
    theta = zero_free_direction(q, interval)
    if theta is None:
        return not is_disconjugate(q, interval)
    return count_zeros(IVP(q, interval.a, math.cos(theta), math.sin(theta)), interval) == 0


def run_property_sweep(seed: int, count: int) -> list[SuiteResult]:
    """Run every randomized invariant suite on ``count`` cases drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    cases = {
        "verdict_disconjugacy_equivalence": (_equivalence_case, [random_pair(rng, "any") for _ in range(count)]),
        "classic_sct_holds": (_classic_case, [random_pair(rng, "ordered") for _ in range(count)]),
        "strict_gap_fails": (_gap_case, [random_pair(rng, "gap") for _ in range(count)]),
        "linearity": (_linearity_case, [
            (random_step_potential(rng, low=-2.0), tuple(rng.normal(size=2)), tuple(rng.normal(size=2)),
             float(rng.normal()), float(rng.normal()))
            for _ in range(count)]),
        "scaling_invariance": (_scaling_case, [
            (random_step_potential(rng, high=20.0), float(rng.uniform(0, math.pi))) for _ in range(count)]),
        "wronskian_constancy": (_wronskian_case, [random_step_potential(rng, low=-2.0, high=20.0)
                                                  for _ in range(count)]),
        "zero_identity": (_identity_case, [
            (random_step_potential(rng, high=20.0), float(rng.uniform(-5, 5))) for _ in range(count)]),
        "disconjugacy_monotone": (_monotone_case, [
            (lambda q, x: (q, *sorted(x)))(random_step_potential(rng, high=2.0), rng.uniform(0, PI, 2))
            for _ in range(count)]),
        "disconjugacy_witness": (_witness_case, [
            (random_step_potential(rng, low=-1.0, high=2.0), Interval(0.0, float(rng.uniform(0.5, PI))))
            for _ in range(count)]),
    }
    results = []
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        for name, (fn, items) in cases.items():
            outcomes = list(pool.map(fn, items))
            passed = sum(bool(x) for x in outcomes)
            results.append(SuiteResult(name, passed, len(outcomes) - passed))
    return results
