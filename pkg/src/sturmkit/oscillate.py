"""Zero counting through the Prüfer angle, conjugate points and disconjugacy.

With ``v = r sin(theta)``, ``v' = r cos(theta)`` the angle obeys
``theta' = cos^2 theta + q sin^2 theta``, which equals 1 whenever ``theta`` is a
multiple of pi.  Zeros of ``v`` are therefore exactly the upward crossings of
``theta`` through ``k pi`` and the continuous lift never re-crosses one
downward.  The lift is tracked as ``theta = K pi + frac`` with an integer
``K`` updated node by node: its parity is fixed by the signs of ``(v, v')``,
and on a constant piece the exact phase advance supplies the magnitude.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .potential import Interval, PiecewisePotential
from .propagate import DEFAULT_TOL, IVP, Flow, build_flow, fundamental

ENDPOINT_TOL = 1e-12
SWEEP_DIRECTIONS = 720


@dataclass(frozen=True)
class PruferState:
    t: float
    theta: float
    logr: float


@dataclass(frozen=True)
class ZeroSet:
    zeros: tuple[float, ...]
    interval: Interval
    closed: bool = True

    def __len__(self) -> int:
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def interior(self) -> "ZeroSet":
        """Zeros in the open interval ``(a, b)``."""
        a, b = self.interval.a, self.interval.b
        return ZeroSet(tuple(z for z in self.zeros if a < z < b), self.interval, closed=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("index,t\n")
        for i, z in enumerate(self.zeros):
            buf.write(f"{i},{z:.17g}\n")
        return buf.getvalue()


def _quadrant(v, dv):
    """floor(atan2(v, dv) / pi): -1 for v < 0, 0 for v > 0 or (v = 0, dv >= 0), 1 otherwise."""
    return np.floor(np.arctan2(v, dv) / math.pi).astype(np.int64)


def _advance(level, h, y0, y1):
    """Number of zeros in ``(s, s + h]`` given states ``y0``, ``y1`` (shape ``(2, n)``) at its ends."""
    parity = np.mod(_quadrant(y1[0], y1[1]) - _quadrant(y0[0], y0[1]), 2)
    if level is None or level <= 0.0:
        # at most one zero: non-oscillatory piece or a capped numeric step
        return parity
    w = math.sqrt(level)
    phase = np.arctan2(w * y0[0], y0[1])
    est = (phase + w * h) / math.pi - np.floor(phase / math.pi)
    n = np.floor(est).astype(np.int64)
    bad = np.mod(n, 2) != parity
    up = (est - n) > 0.5
    n = np.where(bad & (up | (n == 0)), n + 1, np.where(bad, n - 1, n))
    return n


class Lift:
    """Continuous Prüfer lift for solutions ``Y(t) @ c`` of a flow (``c`` has shape ``(m, n)``)."""

    def __init__(self, flow: Flow, coeffs: np.ndarray):
        self.flow = flow
        self.c = np.asarray(coeffs, dtype=float).reshape(flow.segments[0].states.shape[-1], -1)
        ts, ys, levels = flow.node_table()
        self.nodes = ts
        self.levels = levels
        self.ys = ys @ self.c  # (N, 2, n)
        K = np.empty((len(ts), self.c.shape[1]), dtype=np.int64)
        K[0] = _quadrant(self.ys[0, 0], self.ys[0, 1])
        for j in range(len(ts) - 1):
            K[j + 1] = K[j] + _advance(levels[j], ts[j + 1] - ts[j], self.ys[j], self.ys[j + 1])
        self.K = K

    def state(self, t: float) -> np.ndarray:
        return self.flow.at(t) @ self.c

    def turns(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """``(K(t), y(t))`` with ``theta(t) = K pi + frac(y)``."""
        j = int(np.searchsorted(self.nodes, t, side="right")) - 1
        j = min(max(j, 0), len(self.nodes) - 1)
        y = self.state(t)
        if t == self.nodes[j]:
            return self.K[j], y
        return self.K[j] + _advance(self.levels[j], t - self.nodes[j], self.ys[j], y), y

    def theta(self, t: float) -> np.ndarray:
        K, y = self.turns(t)
        return _theta(K, y)

    def prufer(self, t: float) -> list[PruferState]:
        K, y = self.turns(t)
        th = _theta(K, y)
        logr = 0.5 * np.log(y[0] ** 2 + y[1] ** 2)
        return [PruferState(t, float(a), float(b)) for a, b in zip(th, logr)]

    def _ends(self, t: float):
        K, y = self.turns(t)
        th = _theta(K, y)
        r = np.hypot(y[0], y[1])
        at_zero = np.abs(y[0]) < ENDPOINT_TOL * r
        return th, K, at_zero

    def zero_range(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Index bounds ``[lo, hi]`` of multiples of pi reached on ``[a, b]`` plus endpoint flags."""
        tha, Ka, za = self._ends(a)
        thb, Kb, zb = self._ends(b)
        lo = np.where(za, np.rint(tha / math.pi).astype(np.int64), Ka + 1)
        hi = np.where(zb, np.rint(thb / math.pi).astype(np.int64), Kb)
        return lo, hi, za, zb

    def count(self, a: float, b: float) -> np.ndarray:
        lo, hi, _, _ = self.zero_range(a, b)
        return np.maximum(hi - lo + 1, 0)

    def count_open(self, a: float, b: float) -> np.ndarray:
        lo, hi, za, zb = self.zero_range(a, b)
        return np.maximum(hi - lo + 1 - za.astype(int) - zb.astype(int), 0)

    def locate(self, a: float, b: float, column: int = 0) -> list[float]:
        lo, hi, za, zb = (x[column] for x in self.zero_range(a, b))
        zeros = []
        for k in range(int(lo), int(hi) + 1):
            if k == lo and za:
                zeros.append(a)
            elif k == hi and zb:
                zeros.append(b)
            else:
                zeros.append(self._bisect(k, a, b, column))
        return zeros

    def _bisect(self, k: int, a: float, b: float, column: int) -> float:
        # theta >= k pi is an up-set in t, so bisect on it; bracket by nodes first
        inside = (self.nodes > a) & (self.nodes < b) & (self.K[:, column] >= k)
        idx = np.flatnonzero(inside)
        l, r = a, b
        if len(idx):
            r = float(self.nodes[idx[0]])
            prev = self.nodes[(self.nodes < r) & (self.nodes > a)]
            if len(prev):
                l = float(prev[-1])
        while True:
            m = 0.5 * (l + r)
            if m <= l or m >= r:
                break
            if self.turns(m)[0][column] >= k:
                r = m
            else:
                l = m
        return 0.5 * (l + r)


def _theta(K, y):
    frac = np.arctan2(y[0], y[1]) - _quadrant(y[0], y[1]) * math.pi
    return K * math.pi + frac


def _check_interval(q: PiecewisePotential, interval: Interval):
    if not interval.within(q.domain):
        raise DomainError(f"interval [{interval.a}, {interval.b}] not inside [{q.a}, {q.b}]")


def lift_ivp(ivp: IVP, t_end: float, tol: float = DEFAULT_TOL) -> Lift:
    flow = build_flow(ivp.q, ivp.t0, t_end, np.array([[ivp.v0], [ivp.dv0]]), tol)
    return Lift(flow, np.ones((1, 1)))


def direction_lift(q: PiecewisePotential, interval: Interval, angles, tol: float = DEFAULT_TOL) -> Lift:
    """Lift for the solutions ``v(a) = cos(angle), v'(a) = sin(angle)``, one column per angle."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    flow = fundamental(q, interval.a, interval.b, tol)
    return Lift(flow, np.vstack([np.cos(angles), np.sin(angles)]))


def _ivp_lift(ivp: IVP, interval: Interval, tol: float) -> Lift:
    _check_interval(ivp.q, interval)
    if interval.a < ivp.t0:
        raise DomainError(f"interval starts at {interval.a}, before the initial point {ivp.t0}")
    return lift_ivp(ivp, interval.b, tol)


def count_zeros(ivp: IVP, interval: Interval, tol: float = DEFAULT_TOL) -> int:
    """Zeros of the solution in the closed interval (endpoints within 1e-12 in |sin theta|)."""
    return int(_ivp_lift(ivp, interval, tol).count(interval.a, interval.b)[0])


def locate_zeros(ivp: IVP, interval: Interval, tol: float = DEFAULT_TOL) -> ZeroSet:
    lift = _ivp_lift(ivp, interval, tol)
    zeros = lift.locate(interval.a, interval.b)
    if len(zeros) != int(lift.count(interval.a, interval.b)[0]):
        raise InternalConsistencyError("located zeros disagree with the crossing count")
    return ZeroSet(tuple(zeros), interval)


def first_conjugate_point(q: PiecewisePotential, a: float, b: float, tol: float = DEFAULT_TOL) -> float | None:
    """First zero in ``(a, b]`` of the solution with ``y(a) = 0, y'(a) = 1``."""
    interval = Interval(a, b)
    _check_interval(q, interval)
    lift = Lift(fundamental(q, a, b, tol), np.array([[0.0], [1.0]]))
    zeros = lift.locate(a, b)
    later = [z for z in zeros if z > a]
    return later[0] if later else None


def is_disconjugate(q: PiecewisePotential, interval: Interval, tol: float = DEFAULT_TOL) -> bool:
    return first_conjugate_point(q, interval.a, interval.b, tol) is None


def sweep_angles(n: int = SWEEP_DIRECTIONS) -> np.ndarray:
    return np.arange(n) * (math.pi / n)


def sweep_counts(q: PiecewisePotential, interval: Interval, n: int = SWEEP_DIRECTIONS,
                 tol: float = DEFAULT_TOL, open_interval: bool = False) -> np.ndarray:
    """Zero counts for ``n`` equispaced directions in ``[0, pi)``."""
    _check_interval(q, interval)
    lift = direction_lift(q, interval, sweep_angles(n), tol)
    if open_interval:
        return lift.count_open(interval.a, interval.b)
    return lift.count(interval.a, interval.b)


def _min_abs(q, interval, angles, tol, grid=400):
    lift = direction_lift(q, interval, angles, tol)
    ts = np.linspace(interval.a, interval.b, grid)
    vals = np.stack([lift.state(float(t))[0] for t in ts])
    norms = np.hypot(np.cos(angles), np.sin(angles))
    return np.min(np.abs(vals), axis=0) / norms, lift.count(interval.a, interval.b)


def zero_free_direction(q: PiecewisePotential, interval: Interval, tol: float = DEFAULT_TOL) -> float | None:
    """An angle ``theta*`` in ``[0, pi)`` whose solution ``(cos, sin)`` has no zero on the interval."""
    disconjugate = is_disconjugate(q, interval, tol)
    angles = sweep_angles()
    counts = direction_lift(q, interval, angles, tol).count(interval.a, interval.b)
    hits = np.flatnonzero(counts == 0)
    if not disconjugate:
        if len(hits):
            raise InternalConsistencyError(
                f"direction {angles[hits[0]]:.17g} is zero-free but a conjugate point exists")
        return None
    if len(hits):
        return float(angles[hits[0]])
    # refine around the direction whose solution stays farthest from zero
    step = math.pi / SWEEP_DIRECTIONS
    margin, _ = _min_abs(q, interval, angles, tol)
    centre = angles[int(np.argmax(margin))]
    fine = np.mod(centre + np.linspace(-step, step, 201), math.pi)
    counts = direction_lift(q, interval, fine, tol).count(interval.a, interval.b)
    hits = np.flatnonzero(counts == 0)
    if len(hits):
        return float(fine[hits[0]])
    # a small positive start value added to the principal solution y(a)=0, y'(a)=1
    for s in 2.0 ** -np.arange(1, 60):
        theta = math.atan2(1.0, s)
        if direction_lift(q, interval, [theta], tol).count(interval.a, interval.b)[0] == 0:
            return theta
    raise InternalConsistencyError("disconjugate interval but no zero-free direction was found")


def check_interlacing(q: PiecewisePotential, interval: Interval, tol: float = DEFAULT_TOL) -> bool:
    """Sturm separation for the basis at ``a``: each gap of one solution holds exactly one zero of the other."""
    _check_interval(q, interval)
    lift = Lift(fundamental(q, interval.a, interval.b, tol), np.eye(2))
    z1 = lift.locate(interval.a, interval.b, 0)
    z2 = lift.locate(interval.a, interval.b, 1)

    def separated(outer, inner):
        inner = np.asarray(inner)
        for l, r in zip(outer, outer[1:]):
            if np.count_nonzero((inner > l) & (inner < r)) != 1:
                return False
        return True

    return separated(z1, z2) and separated(z2, z1)
