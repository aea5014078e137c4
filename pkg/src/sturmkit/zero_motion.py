"""Motion of a zero t0(lam) of the family v(0) = 1, v'(0) = lam.

At a simple zero ``dt0/dlam = -v_lam / v'``; since ``W(v, v_lam) = 1`` the
numerator ``v' v_lam`` is ``-1`` and zeros always move right.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .oscillate import DEFAULT_TOL, Lift
from .potential import Interval, PiecewisePotential
from .propagate import fundamental

ZERO_RESIDUAL = 1e-10
DEGENERATE_SLOPE = 1e-12
MERGE_GAP = 1e-6
MAX_HALVINGS = 40
EXIT_XTOL = 1e-12


def _basis(q: PiecewisePotential, tol: float):
    """Basis at ``q.a``: ``v(., lam)`` is ``y1 + lam y2`` and ``v_lam`` is ``y2``."""
    return fundamental(q, q.a, q.b, tol)


def _family(q: PiecewisePotential, lam: float, tol: float) -> Lift:
    return Lift(_basis(q, tol), np.array([[1.0], [lam]]))


def zeros_at(q: PiecewisePotential, lam: float, interval: Interval | None = None,
             tol: float = DEFAULT_TOL) -> list[float]:
    """Zeros of ``v(., lam)`` on ``interval`` (default: the whole domain)."""
    interval = interval or q.domain
    return _family(q, lam, tol).locate(interval.a, interval.b)


def dt0_dlambda(q: PiecewisePotential, lam: float, t0: float, tol: float = DEFAULT_TOL) -> float:
    """``-v'(t0) v_lam(t0) / v'(t0)^2`` with ``v_lam`` from the variational IVP."""
    Y = _basis(q, tol).at(t0)
    v, dv = Y[0, 0] + lam * Y[0, 1], Y[1, 0] + lam * Y[1, 1]
    v_lam = Y[0, 1]  # the variational solution w(0) = 0, w'(0) = 1 is the second column
    if abs(v) > ZERO_RESIDUAL * max(1.0, math.hypot(v, dv)):
        raise DomainError(f"t0={t0} is not a zero of v(., {lam}) (v = {v:.3e})")
    if abs(dv) < DEGENERATE_SLOPE:
        raise InternalConsistencyError(f"degenerate zero at t0={t0}: v' = {dv:.3e}")
    return -dv * v_lam / (dv * dv)


def check_identity(q: PiecewisePotential, lam: float, tol: float = DEFAULT_TOL) -> float | None:
    """max |v'(t0) v_lam(t0) + 1| over the zeros on the domain; ``None`` when there are none."""
    flow = _basis(q, tol)
    zeros = zeros_at(q, lam, tol=tol)
    if not zeros:
        return None
    worst = 0.0
    for t0 in zeros:
        Y = flow.at(t0)
        dv = Y[1, 0] + lam * Y[1, 1]
        worst = max(worst, abs(dv * Y[0, 1] + 1.0))
    return worst


@dataclass(frozen=True)
class ZeroTrack:
    lambda_grid: tuple[float, ...]
    t0: tuple[float, ...]
    dt0_dlambda: tuple[float, ...]
    exit_lambda: float | None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("lambda,t0,dt0_dlambda\n")
        for lam, t, d in zip(self.lambda_grid, self.t0, self.dt0_dlambda):
            buf.write(f"{lam:.17g},{t:.17g},{d:.17g}\n")
        buf.write(json.dumps({"exit_lambda": self.exit_lambda}) + "\n")
        return buf.getvalue()


def _nearest(zeros: list[float], target: float) -> tuple[float | None, float]:
    """Nearest zero to ``target`` and its distance to the runner-up."""
    if not zeros:
        return None, math.inf
    order = sorted(zeros, key=lambda z: abs(z - target))
    gap = abs(order[1] - order[0]) if len(order) > 1 else math.inf
    return order[0], gap


def _exit_point(q, lam_in, lam_out, which, tol) -> float:
    """Bisect the slope at which zero number ``which`` leaves through the right end."""
    lo, hi = lam_in, lam_out
    while hi - lo > EXIT_XTOL * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if len(zeros_at(q, mid, tol=tol)) > which:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def track_zero(q: PiecewisePotential, lam_start: float, lam_end: float, n: int,
               which: int = 0, tol: float = DEFAULT_TOL) -> ZeroTrack:
    """Follow zero number ``which`` from ``lam_start`` along ``n`` equispaced slopes.

    Each step matches the zero nearest to the first-order prediction and halves
    the slope step while that match is ambiguous (another zero within 1e-6) or
    disagrees with the ordering.  Zeros cannot enter through the left end since
    ``v(a) = 1``, so the tracked zero keeps its index until it leaves through
    the right end.
    """
    if not lam_start < lam_end:
        raise DomainError(f"need lambda_start < lambda_end, got {lam_start}, {lam_end}")
    if n < 2:
        raise DomainError(f"need at least two grid points, got {n}")
    zeros = zeros_at(q, lam_start, tol=tol)
    if len(zeros) <= which:
        raise DomainError(f"v(., {lam_start}) has only {len(zeros)} zeros on [{q.a}, {q.b}]")
    grid = [float(x) for x in np.linspace(lam_start, lam_end, n)]
    lam_cur, t_cur = grid[0], zeros[which]
    ts, ds = [t_cur], [dt0_dlambda(q, lam_cur, t_cur, tol)]
    exit_lambda = None
    for lam_next in grid[1:]:
        step = lam_next - lam_cur
        halvings = 0
        while exit_lambda is None and lam_cur < lam_next:
            trial = min(lam_cur + step, lam_next)
            cand = zeros_at(q, trial, tol=tol)
            if len(cand) <= which:
                exit_lambda = _exit_point(q, lam_cur, trial, which, tol)
                break
            predicted = t_cur + dt0_dlambda(q, lam_cur, t_cur, tol) * (trial - lam_cur)
            z, gap = _nearest(cand, predicted)
            if z != cand[which] or gap < MERGE_GAP:
                if halvings == MAX_HALVINGS:
                    raise InternalConsistencyError(f"zero lost near lambda={lam_cur} without exiting")
                step *= 0.5
                halvings += 1
                continue
            if not z > t_cur:
                raise InternalConsistencyError(f"zero moved left between lambda={lam_cur} and {trial}")
            lam_cur, t_cur = trial, z
        if exit_lambda is None:
            ts.append(t_cur)
            ds.append(dt0_dlambda(q, lam_cur, t_cur, tol))
        else:
            ts.append(math.nan)
            ds.append(math.nan)
    return ZeroTrack(tuple(grid), tuple(ts), tuple(ds), exit_lambda)
