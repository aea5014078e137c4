import math

import numpy as np
import pytest

from sturmkit.errors import DomainError, PreconditionError
from sturmkit.oscillate import count_zeros, is_disconjugate
from sturmkit.potential import Interval, PiecewisePotential, build_theorem1_q2
from sturmkit.propagate import IVP
from sturmkit.sct import (
    check_lemma2,
    compare_pointwise,
    consecutive_zeros,
    converse_counterexample,
    large_M_report,
    sct_verdict,
)
from sturmkit.sweeps import random_pair, run_property_sweep

PI = math.pi


def test_consecutive_zeros():
    assert consecutive_zeros(PiecewisePotential.constant(1.0)) == pytest.approx((0.0, PI), abs=1e-12)
    assert consecutive_zeros(PiecewisePotential.constant(1.0, 0.0, PI / 2)) is None
    assert consecutive_zeros(PiecewisePotential.constant(4.0)) == pytest.approx((0.0, PI / 2), abs=1e-12)


def test_verdict_identical(one):
    v = sct_verdict(one, one)
    assert v.outcome == "holds" and v.witness >= 1
    assert v.diagnostics["u_consecutive_at_ends"] and v.diagnostics["q1_le_q2"]


def test_verdict_theorem1(one, step_half):
    v = sct_verdict(one, step_half)
    assert v.outcome == "fails" and v.disconjugate
    theta = v.witness
    assert count_zeros(IVP(step_half, 0.0, math.cos(theta), math.sin(theta)), Interval(0.0, PI)) == 0
    d = v.to_dict()
    assert set(d) == {"outcome", "a", "b", "witness_theta", "disconjugate", "diagnostics"}


@pytest.mark.parametrize("level", [0.01, 0.0625, 0.25])
def test_strict_gap_fails(one, level):
    q2 = PiecewisePotential.constant(level)
    v = sct_verdict(one, q2)
    assert v.outcome == "fails" and v.diagnostics["q1_gt_q2"]
    assert v.diagnostics["sweep_min_zeros"] == 0


def test_not_applicable():
    q = PiecewisePotential.constant(0.25)
    v = sct_verdict(q, PiecewisePotential.constant(10.0))
    assert v.outcome == "not-applicable" and v.disconjugate is None


def test_domain_mismatch(one):
    with pytest.raises(DomainError):
        sct_verdict(one, PiecewisePotential.constant(1.0, 0.0, 3.0))


def test_compare_pointwise_breakpoint_owner():
    q1 = PiecewisePotential.steps([0.0, 1.0, 2.0], [1.0, 2.0])
    q2 = PiecewisePotential.steps([0.0, 1.0, 2.0], [2.0, 2.0])
    assert compare_pointwise(q1, q2, Interval(0.0, 2.0)) == (True, False)
    q3 = PiecewisePotential.steps([0.0, 1.5, 2.0], [2.0, 1.5])
    assert compare_pointwise(q1, q3, Interval(0.0, 2.0)) == (False, False)


def test_lemma2_examples(one, step_half):
    assert check_lemma2(one, step_half, Interval(PI - 0.5, PI))
    assert check_lemma2(one, PiecewisePotential.constant(0.25), Interval(0.0, PI))
    with pytest.raises(PreconditionError) as info:
        check_lemma2(one, one, Interval(0.0, PI))
    assert info.value.reason == "q1-not-greater"
    with pytest.raises(PreconditionError) as info:
        check_lemma2(PiecewisePotential.constant(9.0), one, Interval(0.0, PI))
    assert info.value.reason == "u-interior-zero"
    with pytest.raises(PreconditionError) as info:
        check_lemma2(PiecewisePotential.constant(0.1), one, Interval(0.0, PI))
    assert info.value.reason == "no-comparison-solution"


@pytest.mark.parametrize("eps", [0.1, PI / 2])
def test_converse_constructions(eps):
    delta_rep, big_rep = converse_counterexample(eps)
    for rep in (delta_rep, big_rep):
        assert rep.verdict.outcome == "holds" and rep.min_interior_zeros >= 1 and rep.q1_le_q2
    d = delta_rep.delta
    assert delta_rep.located_zeros == pytest.approx((PI * d / 2, 3 * PI * d / 2), abs=1e-10)
    assert all(0 < z < eps for z in delta_rep.located_zeros)


def test_large_M_half(one):
    rep = large_M_report(one, Interval(0.0, 0.5))
    assert rep.level == pytest.approx((2 * PI / 0.5) ** 2)
    assert rep.verdict.outcome == "holds" and rep.min_zeros_in_J >= 1


@pytest.mark.parametrize("seed", [0, 11])
def test_equivalence_on_random_pairs(seed):
    rng = np.random.default_rng(seed)
    for _ in range(15):
        q1, q2 = random_pair(rng, "any")
        v = sct_verdict(q1, q2)
        assert v.outcome != "not-applicable"
        assert (v.outcome == "fails") == is_disconjugate(q2, v.interval)


def test_property_sweep_small():
    results = run_property_sweep(5, 4)
    assert [r.name for r in results][0] == "verdict_disconjugacy_equivalence"
    assert all(r.ok and r.passed == 4 for r in results)
