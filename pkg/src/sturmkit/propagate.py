"""Initial-value problems for v'' + q(t) v = 0.

Constant pieces are crossed exactly with 2x2 transfer matrices; expression
pieces are integrated with an adaptive embedded Runge-Kutta pair (DOP853),
one piece at a time so no step ever straddles a breakpoint.
"""

from __future__ import annotations

import bisect
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericError
from .potential import PiecewisePotential, Piece

DEFAULT_TOL = 1e-10
LOCAL_TOL_FACTOR = 1e-2
SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class IVP:
    q: PiecewisePotential
    t0: float
    v0: float
    dv0: float

    def __post_init__(self):
        if not self.q.a <= self.t0 <= self.q.b:
            raise DomainError(f"t0={self.t0} outside [{self.q.a}, {self.q.b}]")
        if self.v0 == 0.0 and self.dv0 == 0.0:
            raise DomainError("initial data (0, 0) gives the trivial solution")
        if not (math.isfinite(self.v0) and math.isfinite(self.dv0)):
            raise DomainError("initial data must be finite")


@dataclass(frozen=True)
class State:
    t: float
    v: float
    dv: float


def _cos_sin(level: float, h: float) -> tuple[float, float, float]:
    """Return ``(C, S, C')`` for the basis C(0)=1, C'(0)=0 and S(0)=0, S'(0)=1 at ``h``."""
    x = level * h * h
    if abs(x) < SERIES_CUTOFF**2:
        # Taylor in x = level h^2 avoids sin(w h)/w cancellation.
        c = 1.0 - x / 2.0 + x * x / 24.0
        s = h * (1.0 - x / 6.0 + x * x / 120.0)
        dc = -level * h * (1.0 - x / 6.0 + x * x / 120.0)
        return c, s, dc
    if level > 0.0:
        w = math.sqrt(level)
        return math.cos(w * h), math.sin(w * h) / w, -w * math.sin(w * h)
    k = math.sqrt(-level)
    return math.cosh(k * h), math.sinh(k * h) / k, k * math.sinh(k * h)


def transfer_matrix(level: float, h: float) -> np.ndarray:
    """Map ``(v, v')`` across a piece of constant ``level`` and length ``h``."""
    c, s, dc = _cos_sin(level, h)
    return np.array([[c, s], [dc, c]])


def wronskian(s1: State, s2: State) -> float:
    if s1.t != s2.t:
        raise DomainError(f"Wronskian needs a common abscissa, got {s1.t} and {s2.t}")
    return s1.v * s2.dv - s1.dv * s2.v


def variational_solution(q: PiecewisePotential, t0: float) -> IVP:
    """IVP for the slope derivative ``v_lambda`` of the family ``v(t0)=1, v'(t0)=lambda``."""
    return IVP(q, t0, 0.0, 1.0)


# --- flows ------------------------------------------------------------------


@dataclass
class _Segment:
    left: float
    right: float
    level: float | None
    nodes: np.ndarray  # step abscissae including both ends
    states: np.ndarray  # (len(nodes), 2, m)
    dense: object = None

    def at(self, t: float) -> np.ndarray:
        if self.level is not None:
            return transfer_matrix(self.level, t - self.left) @ self.states[0]
        return self.dense(t).reshape(self.states.shape[1:])


@dataclass
class Flow:
    """Solutions for a block of initial columns ``Y0`` (shape ``(2, m)``) over ``[t0, t1]``.

    Node abscissae are piece boundaries and, inside expression pieces, the
    accepted integrator steps.  Between two consecutive nodes an expression
    piece carries at most one zero of any solution (steps are capped below
    the minimal zero spacing).
    """

    q: PiecewisePotential
    t0: float
    t1: float
    segments: list[_Segment]
    tol: float
    exact: bool
    _lefts: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._lefts = [s.left for s in self.segments]

    def segment(self, t: float) -> _Segment:
        if not self.t0 <= t <= self.t1:
            raise DomainError(f"t={t} outside the solved range [{self.t0}, {self.t1}]")
        i = max(0, bisect.bisect_right(self._lefts, t) - 1)
        return self.segments[i]

    def at(self, t: float) -> np.ndarray:
        return self.segment(t).at(t)

    def node_table(self) -> tuple[np.ndarray, np.ndarray, list]:
        """All nodes, the stacked states there and the level of each node interval."""
        ts, ys, levels = [], [], []
        for seg in self.segments:
            ts.extend(seg.nodes[:-1])
            ys.extend(seg.states[:-1])
            levels.extend([seg.level] * (len(seg.nodes) - 1))
        last = self.segments[-1]
        ts.append(last.nodes[-1])
        ys.append(last.states[-1])
        return np.asarray(ts), np.asarray(ys), levels


def _integrate_piece(piece: Piece, lo: float, hi: float, Y: np.ndarray, tol: float) -> _Segment:
    shape = Y.shape
    grid = np.linspace(lo, hi, 257)
    qmax = max(piece(float(t)) for t in grid)
    max_step = hi - lo
    if qmax > 0.0:
        # zeros of any solution are at least pi/sqrt(qmax) apart
        max_step = min(max_step, 1.0 / math.sqrt(qmax))

    def rhs(t, y):
        Yt = y.reshape(shape)
        return np.concatenate([Yt[1], -piece(t) * Yt[0]])

    # local error targets sit below tol so the accumulated error stays near tol
    local = tol * LOCAL_TOL_FACTOR
    sol = solve_ivp(rhs, (lo, hi), Y.reshape(-1), method="DOP853", rtol=local, atol=local,
                    max_step=max_step, dense_output=True)
    if sol.status != 0:
        where = sol.t[-1] if len(sol.t) else lo
        raise NumericError(f"integration failed near t={where:.17g}: {sol.message}")
    states = sol.y.T.reshape((-1,) + shape)
    return _Segment(lo, hi, None, sol.t.copy(), states, sol.sol)


def build_flow(q: PiecewisePotential, t0: float, t1: float, Y0: np.ndarray,
               tol: float = DEFAULT_TOL, method: str = "auto") -> Flow:
    """Propagate the columns of ``Y0`` from ``t0`` to ``t1``.

    ``method`` is ``"auto"`` (exact on constant pieces, numeric otherwise),
    ``"exact"`` (fails on expression pieces) or ``"numeric"`` (everything numeric).
    """
    if not q.a <= t0 <= t1 <= q.b:
        raise DomainError(f"need {q.a} <= t0 <= t_end <= {q.b}, got t0={t0}, t_end={t1}")
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    Y = np.array(Y0, dtype=float).reshape(2, -1)
    segments = []
    if t0 == t1:
        segments.append(_Segment(t0, t1, 0.0, np.array([t0, t1]), np.stack([Y, Y])))
        return Flow(q, t0, t1, segments, tol, True)
    all_exact = True
    for piece in q.pieces_over(t0, t1):
        lo, hi = max(piece.left, t0), min(piece.right, t1)
        use_exact = piece.is_constant and method != "numeric"
        if method == "exact" and not piece.is_constant:
            raise DomainError(f"exact propagation needs constant pieces; [{piece.left}, {piece.right}) "
                              f"is {piece.expr!r}")
        if use_exact:
            Y1 = transfer_matrix(piece.value, hi - lo) @ Y
            segments.append(_Segment(lo, hi, piece.value, np.array([lo, hi]), np.stack([Y, Y1])))
        else:
            all_exact = False
            seg = _integrate_piece(piece, lo, hi, Y, tol)
            segments.append(seg)
            Y1 = seg.states[-1]
        Y = Y1
    return Flow(q, t0, t1, segments, tol, all_exact)


@lru_cache(maxsize=512)
def fundamental(q: PiecewisePotential, t0: float, t1: float, tol: float = DEFAULT_TOL,
                method: str = "auto") -> Flow:
    """Cached flow of the basis ``y1(t0)=1, y1'(t0)=0`` and ``y2(t0)=0, y2'(t0)=1``."""
    return build_flow(q, t0, t1, np.eye(2), tol, method)


# --- public operations --------------------------------------------------------


def propagate_exact(ivp: IVP, t_end: float) -> State:
    """``(v, v')`` at ``t_end`` by a product of transfer matrices."""
    flow = build_flow(ivp.q, ivp.t0, t_end, np.array([[ivp.v0], [ivp.dv0]]), method="exact")
    y = flow.segments[-1].states[-1][:, 0]
    return State(t_end, float(y[0]), float(y[1]))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    method: str
    accuracy: float
    flow: Flow = field(compare=False, repr=False)

    @property
    def samples(self) -> list[State]:
        return [State(float(a), float(b), float(c)) for a, b, c in zip(self.t, self.v, self.dv)]

    def at(self, t: float) -> State:
        y = self.flow.at(t)[:, 0]
        return State(t, float(y[0]), float(y[1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,v,dv\n")
        for a, b, c in zip(self.t, self.v, self.dv):
            buf.write(f"{a:.17g},{b:.17g},{c:.17g}\n")
        return buf.getvalue()


def _trajectory(flow: Flow, method: str, samples: int) -> Trajectory:
    ts, ys, _ = flow.node_table()
    if samples > 0 and flow.t1 > flow.t0:
        extra = np.linspace(flow.t0, flow.t1, samples)
        grid = np.union1d(ts, extra)
        ys = np.stack([flow.at(float(t)) for t in grid])
        ts = grid
    if method == "exact":
        accuracy = np.finfo(float).eps * (len(flow.segments) + 1)
    else:
        accuracy = flow.tol
    return Trajectory(ts, ys[:, 0, 0].copy(), ys[:, 1, 0].copy(), method, float(accuracy), flow)


def integrate_numeric(ivp: IVP, t_end: float, tol: float = DEFAULT_TOL, samples: int = 0) -> Trajectory:
    """Adaptive DOP853 trajectory; samples are the accepted steps (plus ``samples`` uniform points)."""
    flow = build_flow(ivp.q, ivp.t0, t_end, np.array([[ivp.v0], [ivp.dv0]]), tol, method="numeric")
    return _trajectory(flow, "numeric", samples)


def solve(ivp: IVP, t_end: float, tol: float = DEFAULT_TOL, samples: int = 0) -> Trajectory:
    """Exact on constant pieces and numeric elsewhere; the default used by every analysis."""
    flow = build_flow(ivp.q, ivp.t0, t_end, np.array([[ivp.v0], [ivp.dv0]]), tol, method="auto")
    return _trajectory(flow, "exact" if flow.exact else "numeric", samples)
