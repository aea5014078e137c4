"""The nine acceptance criteria, each at its stated tolerance; one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the terminal summary) or
``python tests/test_acceptance.py``.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from sturmkit.oscillate import check_interlacing, count_zeros, is_disconjugate, locate_zeros, sweep_counts
from sturmkit.potential import Interval, PiecewisePotential, build_theorem1_q2
from sturmkit.propagate import IVP, State, integrate_numeric, propagate_exact, transfer_matrix, wronskian
from sturmkit.sct import consecutive_zeros, converse_counterexample, large_M_report, sct_verdict
from sturmkit.sweeps import random_pair
from sturmkit.theorem1 import (
    dv_closed_form,
    epsilon0,
    f_of,
    f_positive_lower_bound,
    find_lambda_threshold,
    g_of,
    g_sup_bound,
    v_closed_form,
)
from sturmkit.zero_motion import check_identity, dt0_dlambda, track_zero, zeros_at

PI = math.pi
EPSILONS = (0.1, 0.3, 0.5, 0.8)
ONE = PiecewisePotential.constant(1.0)
FULL = Interval(0.0, PI)


def report(n: int, checks: dict[str, bool], detail: str = ""):
    """Print and record one line for criterion ``n``, then assert every named check."""
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"AC{n} {'PASS' if ok else 'FAIL'}" + (f"  [failed: {', '.join(failed)}]" if failed else "")
    if detail:
        line += f"  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_ac1_epsilon0():
    e = epsilon0()
    residual = abs(math.sin(e) - e * e)
    report(1, {"residual<1e-12": residual < 1e-12, "rounds_to_0.87": round(e, 2) == 0.87},
           f"eps0={e:.17g} residual={residual:.1e} round2={round(e, 2)}")


def test_ac2_closed_form_vs_exact():
    worst_v, worst_c1 = 0.0, 0.0
    ts = np.linspace(0.0, PI, 2000)
    for eps in EPSILONS:
        q = build_theorem1_q2(eps)
        tb = PI - eps
        for lam in (0.0, 1.0, 10.0, 100.0):
            ivp = IVP(q, 0.0, 1.0, lam)
            worst_v = max(worst_v, max(abs(v_closed_form(eps, lam, float(t)) - propagate_exact(ivp, float(t)).v)
                                       for t in ts))
            left, dleft = lam * math.sin(tb) + math.cos(tb), lam * math.cos(tb) - math.sin(tb)
            worst_c1 = max(worst_c1, abs(left - (lam * f_of(eps, tb) + g_of(eps, tb))),
                           abs(dleft - dv_closed_form(eps, lam, tb)))
    report(2, {"sup|v-exact|<1e-10": worst_v < 1e-10, "C1_mismatch<1e-10": worst_c1 < 1e-10},
           f"sup={worst_v:.1e} c1={worst_c1:.1e}")


def test_ac3_bounds():
    g_ok, f_ok, f_positive, notes = True, True, True, []
    for eps in (0.1, 0.5, 0.8):
        ts = np.linspace(PI - eps, PI, 10_000)
        g_ok &= max(abs(g_of(eps, float(t))) for t in ts) <= g_sup_bound(eps)
    for eps in EPSILONS:
        ts = np.linspace(PI - eps, PI, 10_000)
        fmin = min(f_of(eps, float(t)) for t in ts)
        bound = f_positive_lower_bound(eps)
        f_positive &= bound > 0
        f_ok &= fmin >= bound
        notes.append(f"eps={eps}: min f={fmin:.4g} vs bound {bound:.4g}")
    report(3, {"|g|<=3/(1-eps)": g_ok, "bound>0": f_positive, "min_f>=bound": f_ok}, "; ".join(notes))


def test_ac4_theorem1_end_to_end():
    checks = {"threshold": True, "zero_free_above": True, "sct_fails": True, "zero_at_0": True,
              "verdict==disconjugate": True, "random_equivalence": True}
    lams = []
    for eps in EPSILONS:
        q2 = build_theorem1_q2(eps)
        lam = find_lambda_threshold(eps)
        lams.append(lam)
        checks["threshold"] &= math.isfinite(lam) and lam > 0
        checks["zero_free_above"] &= count_zeros(IVP(q2, 0.0, 1.0, lam + 1), FULL) == 0
        v = sct_verdict(ONE, q2)
        checks["sct_fails"] &= v.outcome == "fails"
        checks["zero_at_0"] &= count_zeros(IVP(q2, 0.0, 1.0, 0.0), FULL) >= 1
        checks["verdict==disconjugate"] &= (v.outcome == "fails") == is_disconjugate(q2, v.interval)
    rng = np.random.default_rng(20240401)
    agree = 0
    for _ in range(50):
        q1, q2 = random_pair(rng, "any")
        v = sct_verdict(q1, q2)
        agree += v.outcome != "not-applicable" and (v.outcome == "fails") == is_disconjugate(q2, v.interval)
    checks["random_equivalence"] = agree == 50
    report(4, checks, "Lambda=" + ",".join(f"{x:.10g}" for x in lams) + f" random={agree}/50")


def test_ac5_zero_motion():
    cases = [(ONE, 1.0), (ONE, 0.0), (PiecewisePotential.constant(36.0), 0.0)]
    cases += [(build_theorem1_q2(eps), lam) for eps in (0.1, 0.5, 0.8) for lam in (-2.0, 0.0, 1.0, 5.0)]
    residual = max(r for r in (check_identity(q, lam) for q, lam in cases) if r is not None)

    cos_track = track_zero(ONE, 0.1, 10.0, 100)
    analytic = max(abs(t - (PI - math.atan(1 / lam))) for lam, t in zip(cos_track.lambda_grid, cos_track.t0))
    step = build_theorem1_q2(0.5)
    step_track = track_zero(step, 0.0, 40.0, 60)
    monotone = True
    for tr in (cos_track, step_track):
        defined = [t for t in tr.t0 if not math.isnan(t)]
        monotone &= all(b > a for a, b in zip(defined, defined[1:]))

    h, fd_err = 1e-5, 0.0
    for q, lam in [(step, 1.0), (step, 20.0), (build_theorem1_q2(0.1), 3.0), (ONE, 2.0)]:
        for k, t0 in enumerate(zeros_at(q, lam)):
            fd = (zeros_at(q, lam + h)[k] - zeros_at(q, lam - h)[k]) / (2 * h)
            fd_err = max(fd_err, abs(dt0_dlambda(q, lam, t0) - fd))
    report(5, {"identity<1e-8": residual < 1e-8, "t0_increasing": monotone,
               "cos_family<1e-9": analytic < 1e-9, "finite_diff<1e-6": fd_err < 1e-6},
           f"identity={residual:.1e} analytic={analytic:.1e} fd={fd_err:.1e}")


def test_ac6_sct_holds_constructions():
    checks = {"delta_holds": True, "delta_sweep": True, "delta_zeros": True, "largeM_holds": True,
              "largeM_sweep": True}
    zero_err = 0.0
    for eps in (0.1, PI / 2):
        delta_rep, _ = converse_counterexample(eps)
        q2 = PiecewisePotential.constant(delta_rep.level)
        checks["delta_holds"] &= delta_rep.verdict.outcome == "holds"
        checks["delta_sweep"] &= sweep_counts(q2, FULL, 720, open_interval=True).min() >= 1
        d = delta_rep.delta
        zs = locate_zeros(IVP(q2, 0.0, 1.0, 0.0), FULL).zeros
        zero_err = max(zero_err, abs(zs[0] - PI * d / 2), abs(zs[1] - 3 * PI * d / 2))
    checks["delta_zeros"] = zero_err < 1e-10
    big = large_M_report(ONE, Interval(0.0, 0.5))
    checks["largeM_holds"] = big.verdict.outcome == "holds"
    checks["largeM_sweep"] = sweep_counts(PiecewisePotential.constant(big.level), FULL, 720,
                                          open_interval=True).min() >= 1
    report(6, checks, f"zero_err={zero_err:.1e} M={big.level:.6g}")


def test_ac7_strict_gap():
    checks = {"at_most_one_zero": True, "fails": True}
    for level in (0.01, 0.0625, 0.25):
        q2 = PiecewisePotential.constant(level)
        checks["at_most_one_zero"] &= sweep_counts(q2, FULL, 720).max() <= 1
        checks["fails"] &= sct_verdict(ONE, q2).outcome == "fails"
    report(7, checks)


def test_ac8_classical_sanity():
    rng = np.random.default_rng(8)
    holds = interlaced = total = 0
    while total < 50:
        q1, q2 = random_pair(rng, "ordered")
        if consecutive_zeros(q1) is None:
            continue
        total += 1
        v = sct_verdict(q1, q2)
        holds += v.outcome == "holds"
        interlaced += check_interlacing(q2, v.interval) and check_interlacing(q1, v.interval)
    report(8, {"holds": holds == 50, "interlacing": interlaced == 50}, f"holds={holds}/50 interlacing={interlaced}/50")


def test_ac9_numerics():
    num_err = 0.0
    for level in (-1.0, 0.0, 0.25, 1.0, 4.0, 36.0):
        q = PiecewisePotential.constant(level)
        for v0, dv0 in ((1.0, 0.0), (0.0, 1.0), (1.0, 3.0)):
            ivp = IVP(q, 0.0, v0, dv0)
            tr = integrate_numeric(ivp, PI, 1e-10, samples=50)
            for t, v, dv in zip(tr.t, tr.v, tr.dv):
                ex = propagate_exact(ivp, float(t))
                num_err = max(num_err, abs(v - ex.v), abs(dv - ex.dv))
    w_err = 0.0
    for q in (ONE, build_theorem1_q2(0.5), build_theorem1_q2(0.1)):
        for lam in (0.0, 1.0, 10.0):
            a = integrate_numeric(IVP(q, 0.0, 1.0, lam), PI, 1e-10, samples=200)
            b = integrate_numeric(IVP(q, 0.0, 0.0, 1.0), PI, 1e-10, samples=200)
            for t in np.linspace(0.0, PI, 200):
                sa, sb = a.at(float(t)), b.at(float(t))
                w_err = max(w_err, abs(wronskian(State(t, sa.v, sa.dv), State(t, sb.v, sb.dv)) - 1.0))
    # every transfer matrix the criteria's potentials use, on whole pieces and on partial steps
    levels = [0.0, 1e-12, 0.01, 0.0625, 0.25, large_M_report(ONE, Interval(0.0, 0.5)).level]
    levels += [r.level for e in (0.1, PI / 2) for r in converse_counterexample(e)]
    potentials = [ONE, *(build_theorem1_q2(e) for e in EPSILONS), *map(PiecewisePotential.constant, levels)]
    rng = np.random.default_rng(8)
    potentials += [q for _ in range(50) for q in random_pair(rng, "ordered")]
    det_err = max(abs(np.linalg.det(transfer_matrix(p.value, h)) - 1.0)
                  for q in potentials for p in q.pieces for h in np.linspace(0.0, p.length, 7))
    report(9, {"numeric_vs_exact<1e-8": num_err < 1e-8, "wronskian<1e-9": w_err < 1e-9, "det<1e-14": det_err < 1e-14},
           f"numeric={num_err:.1e} wronskian={w_err:.1e} det={det_err:.1e}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
