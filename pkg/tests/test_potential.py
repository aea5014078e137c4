import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sturmkit.errors import DomainError, ExpressionError, PotentialError
from sturmkit.oscillate import count_zeros
from sturmkit.potential import (
    Interval,
    PiecewisePotential,
    build_delta_construction,
    build_large_M_construction,
    build_theorem1_q2,
    eval_potential,
    parse_potential_spec,
    rescale_to_standard,
    serialize_potential,
)
from sturmkit.propagate import IVP, propagate_exact

PI = math.pi


def test_parse_single_constant():
    q = parse_potential_spec('{"a":0,"b":3.141592653589793,"pieces":[{"to":"b","const":1}]}')
    assert q == PiecewisePotential.constant(1.0)
    assert q(0.0) == q(PI) == 1.0


def test_theorem1_roundtrip():
    q = build_theorem1_q2(0.5)
    text = serialize_potential(q)
    assert parse_potential_spec(text) == q
    assert serialize_potential(parse_potential_spec(text)) == text


def test_expression_piece():
    q = parse_potential_spec('{"a":0,"b":2,"pieces":[{"to":"b","expr":"1 + 0*sin(t)"}]}')
    assert q(1.0) == 1.0
    assert not q.is_piecewise_constant


def test_pi_strings_accepted():
    q = parse_potential_spec('{"a":0,"b":"pi","pieces":[{"to":"pi/2","const":1},{"to":"b","const":2}]}')
    assert q.b == PI and q.breakpoints[1] == PI / 2


@pytest.mark.parametrize("text,match", [
    ('{"a":0,"b":1,"pieces":[]}', "non-empty"),
    ('{"a":0,"b":1,"pieces":[{"to":0.5,"const":1}]}', "gap"),
    ('{"a":0,"b":1,"pieces":[{"to":0.5,"const":1},{"to":0.4,"const":1},{"to":"b","const":1}]}', "overlap"),
    ('{"a":0,"b":1,"pieces":[{"to":0,"const":1},{"to":"b","const":1}]}', "empty"),
    ('{"a":0,"b":1,"pieces":[{"to":"b","const":1,"expr":"t"}]}', "exactly one"),
    ('{"a":0,"b":1,"pieces":[{"to":"b"}]}', "exactly one"),
    ('{"a":0,"pieces":[{"to":"b","const":1}]}', "missing key 'b'"),
    ('{"a":0,"b":1,"pieces":[{"to":"b","const":1}],"c":2}', "unknown keys"),
    ('[1,2]', "JSON object"),
    ('{"a":0,', "not valid JSON"),
])
def test_validation_errors(text, match):
    with pytest.raises(PotentialError, match=match):
        parse_potential_spec(text)


def test_expression_errors_are_reported():
    with pytest.raises(ExpressionError, match="unknown identifier"):
        parse_potential_spec('{"a":0,"b":1,"pieces":[{"to":"b","expr":"q*t"}]}')
    with pytest.raises(ExpressionError, match="position"):
        parse_potential_spec('{"a":0,"b":1,"pieces":[{"to":"b","expr":"t +"}]}')


def test_eval_theorem1_q2():
    q = build_theorem1_q2(0.5)
    assert eval_potential(q, 1.0) == 1.0
    assert eval_potential(q, PI - 0.5) == 0.25
    assert eval_potential(q, PI) == 0.25
    with pytest.raises(DomainError):
        eval_potential(q, PI + 1e-9)


def test_right_continuity_at_breakpoints():
    q = PiecewisePotential.steps([0.0, 1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert q(1.0) == 2.0 and q(2.0) == 3.0
    assert q(np.nextafter(1.0, 0.0)) == 1.0
    assert q(3.0) == 3.0 and q(0.0) == 1.0


@pytest.mark.parametrize("eps", [0.5, 0.9, 1e-6])
def test_build_theorem1_q2(eps):
    q = build_theorem1_q2(eps)
    (p1, p2) = q.pieces
    assert (p1.left, p1.right, p1.value) == (0.0, PI - eps, 1.0)
    assert (p2.left, p2.right) == (PI - eps, PI)
    assert p2.value == pytest.approx((1 - eps) ** 2, rel=1e-15)
    assert p2.length == pytest.approx(eps, abs=1e-15)


def test_theorem1_q2_limit_and_domain():
    q = build_theorem1_q2(1e-9)
    assert q.pieces[1].value == pytest.approx(1.0, abs=1e-8)
    assert build_theorem1_q2(0.9).pieces[1].value == pytest.approx(0.01, rel=1e-13)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            build_theorem1_q2(bad)


def test_delta_construction():
    delta, q = build_delta_construction(PI / 2)
    assert delta == pytest.approx(1 / 6, rel=1e-15)
    assert q(1.0) == pytest.approx(36.0, rel=1e-14)
    delta, _ = build_delta_construction(0.1)
    assert delta == pytest.approx(0.1 / (3 * PI), rel=1e-15)
    assert PI * delta / 2 < 0.1 and 3 * PI * delta / 2 < 0.1
    with pytest.raises(DomainError):
        build_delta_construction(3 * PI)


def test_large_M_construction():
    one = PiecewisePotential.constant(1.0)
    M, q2 = build_large_M_construction(one, Interval(0.0, PI / 2))
    assert M == pytest.approx(16.0, rel=1e-15)
    # exact propagation of v'' + 16 v = 0 from (0, 1): zeros 0, pi/4, pi/2 inside J
    assert count_zeros(IVP(q2, 0.0, 0.0, 1.0), Interval(0.0, PI / 2)) >= 2
    M, _ = build_large_M_construction(one, Interval(0.0, PI))
    assert M == pytest.approx(4.0, rel=1e-15)
    M, _ = build_large_M_construction(PiecewisePotential.constant(100.0), Interval(0.0, PI))
    assert M == 100.0
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)
    with pytest.raises(DomainError):
        build_large_M_construction(one, Interval(0.0, 4.0))


def test_rescale():
    one = PiecewisePotential.constant(1.0)
    assert rescale_to_standard(one) == one
    q = rescale_to_standard(PiecewisePotential.constant(1.0, 0.0, 2 * PI))
    assert (q.a, q.b) == (0.0, PI) and q(1.0) == pytest.approx(4.0)
    q = rescale_to_standard(PiecewisePotential.steps([2.0, 3.0, 4.0], [1.0, 5.0]))
    assert q.breakpoints[1] == pytest.approx(PI / 2)


def test_rescale_expression_piece():
    q = parse_potential_spec('{"a":1,"b":3,"pieces":[{"to":"b","expr":"t^2"}]}')
    r = rescale_to_standard(q)
    k = 2 / PI
    for s in (0.0, 1.0, PI):
        assert r(s) == pytest.approx(k * k * (1 + k * s) ** 2, rel=1e-14)


@given(st.lists(st.floats(0.1, 30.0), min_size=1, max_size=4), st.floats(-3, 3), st.floats(0.5, 5.0),
       st.floats(0, math.pi))
def test_rescale_preserves_zero_count(levels, a, length, theta):
    breaks = list(np.linspace(a, a + length, len(levels) + 1))
    q = PiecewisePotential.steps(breaks, levels)
    r = rescale_to_standard(q)
    k = length / PI
    before = count_zeros(IVP(q, q.a, math.cos(theta), math.sin(theta)), q.domain)
    # w(s) = v(a + k s) has w'(0) = k v'(a)
    after = count_zeros(IVP(r, 0.0, math.cos(theta), k * math.sin(theta)), r.domain)
    assert before == after


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=6), st.floats(-10, 10))
def test_serialize_roundtrip_full_precision(levels, a):
    breaks = [a + i * 0.1 + i * i * 1e-3 for i in range(len(levels) + 1)]
    q = PiecewisePotential.steps(breaks, levels)
    assert parse_potential_spec(serialize_potential(q)) == q


def test_differs_from_one_exactly_on_length_eps():
    eps = 0.3
    q = build_theorem1_q2(eps)
    changed = [p for p in q.pieces if p.value != 1.0]
    assert sum(p.length for p in changed) == pytest.approx(eps, abs=1e-15)
