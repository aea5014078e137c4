"""The step-potential counterexample: q1 = 1 against q2 = 1, then (1 - eps)^2 on the last eps.

The solution of v'' + q2 v = 0 with ``v(0) = 1, v'(0) = lam`` is
``lam sin t + cos t`` up to ``pi - eps`` and ``lam f(eps, t) + g(eps, t)`` on
the tail; for large enough ``lam`` it has no zero on ``[0, pi]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, NumericError
from .oscillate import count_zeros
from .potential import PI, Interval, PiecewisePotential, build_theorem1_q2
from .propagate import IVP

LAMBDA_CAP = 1e12
LAMBDA_XTOL = 1e-9
MIN_GRID = 10_000
GOLDEN_XTOL = 1e-10


def _check_eps(eps: float):
    if not 0.0 < eps < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {eps}")


def _check_tail(eps: float, t: float):
    _check_eps(eps)
    if not PI - eps <= t <= PI:
        raise DomainError(f"t={t} outside the tail [pi - eps, pi] for eps={eps}")


def coeffs_c1_c2(eps: float, lam: float) -> tuple[float, float]:
    """Closed-form tail coefficients of ``c1 sin((1-eps)t) + c2 cos((1-eps)t)``."""
    _check_eps(eps)
    d = 2.0 * eps - 2.0
    p = eps * (PI - eps)
    s = eps * (PI - eps + 2.0)
    c1 = lam / d * ((eps - 2.0) * math.cos(p) - eps * math.cos(s)) \
        - 1.0 / d * ((eps - 2.0) * math.sin(p) + eps * math.sin(s))
    c2 = lam / d * ((eps - 2.0) * math.sin(p) - eps * math.sin(s)) \
        + 1.0 / d * ((eps - 2.0) * math.cos(p) + eps * math.cos(s))
    return c1, c2


def matching_system(eps: float, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """The C^1 matching conditions at ``pi - eps`` as a 2x2 system ``M [c1, c2] = rhs``."""
    w = 1.0 - eps
    x = w * (PI - eps)
    M = np.array([[math.sin(x), math.cos(x)],
                  [w * math.cos(x), -w * math.sin(x)]])
    rhs = np.array([lam * math.sin(eps) - math.cos(eps),
                    -lam * math.cos(eps) - math.sin(eps)])
    return M, rhs


def f_of(eps: float, t: float) -> float:
    """Slope coefficient of the tail solution, from ``(2-eps) sin(eta) + eps sin(eta + 2 eps)``."""
    _check_tail(eps, t)
    eta = eps * (PI - eps) + t * (1.0 - eps)
    return ((2.0 - eps) * math.sin(eta) + eps * math.sin(eta + 2.0 * eps)) / (2.0 - 2.0 * eps)


def f_of_expanded(eps: float, t: float) -> float:
    """Same function as :func:`f_of` via the four-term sine/cosine expansion."""
    _check_tail(eps, t)
    w = 1.0 - eps
    a = eps * eps - eps * PI
    s = eps * (PI - eps + 2.0)
    total = ((eps - 2.0) * math.cos(a) * math.sin(w * t)
             - eps * math.cos(s) * math.sin(w * t)
             - eps * math.sin(s) * math.cos(w * t)
             - (eps - 2.0) * math.sin(a) * math.cos(w * t))
    return total / (2.0 * eps - 2.0)


def g_of(eps: float, t: float) -> float:
    _check_tail(eps, t)
    w = 1.0 - eps
    a = eps * eps - eps * PI
    s = eps * (PI - eps + 2.0)
    total = ((eps - 2.0) * math.cos(a) * math.cos(w * t)
             + eps * math.cos(s) * math.cos(w * t)
             - eps * math.sin(s) * math.sin(w * t)
             + (eps - 2.0) * math.sin(a) * math.sin(w * t))
    return total / (2.0 * eps - 2.0)


def g_sup_bound(eps: float) -> float:
    _check_eps(eps)
    return 3.0 / (1.0 - eps)


def v_closed_form(eps: float, lam: float, t: float) -> float:
    _check_eps(eps)
    if not 0.0 <= t <= PI:
        raise DomainError(f"t={t} outside [0, pi]")
    if t < PI - eps:
        return lam * math.sin(t) + math.cos(t)
    return lam * f_of(eps, t) + g_of(eps, t)


def dv_closed_form(eps: float, lam: float, t: float) -> float:
    """Derivative of :func:`v_closed_form` (tail branch differentiated through c1, c2)."""
    _check_eps(eps)
    if t < PI - eps:
        return lam * math.cos(t) - math.sin(t)
    c1, c2 = coeffs_c1_c2(eps, lam)
    w = 1.0 - eps
    return w * (c1 * math.cos(w * t) - c2 * math.sin(w * t))


def epsilon0() -> float:
    """Root of ``sin x = x^2`` in ``(0.5, 1.5)`` by bisection."""
    lo, hi = 0.5, 1.5  # sin x - x^2 is positive at 0.5, negative at 1.5
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if math.sin(mid) - mid * mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


EPSILON0 = epsilon0()


def f_positive_lower_bound(eps: float) -> float:
    """``(2 sin eps - 2 eps^2) / (2 - 2 eps)``; positive exactly when ``eps < epsilon0``."""
    _check_eps(eps)
    if eps >= EPSILON0:
        raise DomainError(f"epsilon={eps} is not below epsilon0={EPSILON0:.15g}")
    return (2.0 * math.sin(eps) - 2.0 * eps * eps) / (2.0 - 2.0 * eps)


def f_tail_min(eps: float, n: int = MIN_GRID) -> float:
    """Grid minimum of ``f`` over the tail (``n + 1`` points, endpoints included)."""
    ts = np.linspace(PI - eps, PI, n + 1)
    eta = eps * (PI - eps) + ts * (1.0 - eps)
    vals = ((2.0 - eps) * np.sin(eta) + eps * np.sin(eta + 2.0 * eps)) / (2.0 - 2.0 * eps)
    return float(vals.min())


def _zero_count(q2: PiecewisePotential, lam: float) -> int:
    return count_zeros(IVP(q2, 0.0, 1.0, lam), Interval(0.0, PI))


def find_lambda_threshold(eps: float) -> float:
    """Smallest ``lam >= 0`` whose solution has no zero on ``[0, pi]`` (bisection to 1e-9)."""
    _check_eps(eps)
    if eps >= EPSILON0:
        raise DomainError(f"epsilon={eps} is not below epsilon0={EPSILON0:.15g}")
    q2 = build_theorem1_q2(eps)
    if _zero_count(q2, 0.0) == 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while _zero_count(q2, hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > LAMBDA_CAP:
            raise NumericError(f"no zero-free slope below {LAMBDA_CAP:g} for epsilon={eps}")
    while hi - lo > LAMBDA_XTOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _zero_count(q2, mid) == 0:
            hi = mid
        else:
            lo = mid
    return hi


def min_v(eps: float, lam: float, n: int = MIN_GRID) -> tuple[float, float]:
    """``(t*, v(t*))`` minimizing the closed-form solution over ``[0, pi]``.

    Grid search on ``n + 1`` points, then golden-section refinement on the two
    neighbouring cells.
    """
    ts = np.linspace(0.0, PI, n + 1)
    vals = np.array([v_closed_form(eps, lam, float(t)) for t in ts])
    i = int(np.argmin(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - inv_phi * (hi - lo), lo + inv_phi * (hi - lo)
    f1, f2 = v_closed_form(eps, lam, x1), v_closed_form(eps, lam, x2)
    while hi - lo > GOLDEN_XTOL:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = v_closed_form(eps, lam, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = v_closed_form(eps, lam, x2)
    best_t, best_v = float(ts[i]), float(vals[i])
    for t in (lo, hi, 0.5 * (lo + hi)):
        v = v_closed_form(eps, lam, t)
        if v < best_v:
            best_t, best_v = t, v
    return best_t, best_v


@dataclass(frozen=True)
class Theorem1Report:
    epsilon: float
    lam: float
    c1: float
    c2: float
    f_lower_bound: float | None
    f_tail_min: float
    g_sup_bound: float
    g_tail_max: float
    t_min: float
    min_v: float
    zero_count: int
    zero_free: bool
    sct_fails: bool
    epsilon0: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def csv_row(self) -> str:
        return (f"{self.epsilon:.17g},{self.lam:.17g},{self.c1:.17g},{self.c2:.17g},"
                f"{self.min_v:.17g},{str(self.zero_free).lower()}")


CSV_HEADER = "epsilon,lambda,c1,c2,min_v,zero_free"


def verify_theorem1(eps: float, lam: float) -> Theorem1Report:
    """Assemble every checkable quantity of the construction at ``(eps, lam)``."""
    from .sct import sct_verdict  # sct builds on this module's constructions

    _check_eps(eps)
    q2 = build_theorem1_q2(eps)
    c1, c2 = coeffs_c1_c2(eps, lam)
    ts = np.linspace(PI - eps, PI, MIN_GRID + 1)
    g_max = max(abs(g_of(eps, float(t))) for t in ts)
    bound = f_positive_lower_bound(eps) if eps < EPSILON0 else None
    t_star, v_star = min_v(eps, lam)
    zeros = _zero_count(q2, lam)
    zero_free = zeros == 0
    if zero_free and not v_star > 0.0:
        raise NumericError(f"zero-free solution with minimum {v_star} at t={t_star}")
    verdict = sct_verdict(PiecewisePotential.constant(1.0), q2)
    return Theorem1Report(
        epsilon=eps, lam=lam, c1=c1, c2=c2,
        f_lower_bound=bound, f_tail_min=f_tail_min(eps),
        g_sup_bound=g_sup_bound(eps), g_tail_max=g_max,
        t_min=t_star, min_v=v_star, zero_count=zeros, zero_free=zero_free,
        sct_fails=verdict.outcome == "fails", epsilon0=EPSILON0,
    )
