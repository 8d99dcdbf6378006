"""Peak control and exceedance quantifiers for a capacity threshold ``M``.

Given an SIR epidemic and a threshold ``M``, this module answers whether the
infected curve exceeds ``M``, finds the critical reproduction number ``R0*`` at
which the peak equals ``M`` exactly, and measures an exceedance five ways:

===  ==========================================================  ============
q1   ``R0 - R0*``                                                 1
q2   ``I_max - M``                                                persons
q3   area of ``I(t) - M`` above the threshold, in time            person*time
q4   area of ``I(u) - M`` above the threshold, in ``u``           person*u
q5   line integral of ``I - M`` along the (S, I, R) curve         person*length
===  ==========================================================  ============

q1 and q2 are signed (negative means a safety margin); q3-q5 are zero when
the threshold is never exceeded.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidInitialCondition, InvalidThreshold, RegimeError
from .lambertw import Branch, lambert_w, solve_log_linear
from .quadrature import simpson_excess_converged
from .sir import (
    ParametricCurve,
    SirParams,
    SirState,
    Trajectory,
    _check_state,
    build_curve,
    integrate,
    rk4_step,
)

__all__ = [
    "ThresholdProblem",
    "CrossingPoints",
    "QuantifierSet",
    "AnalysisReport",
    "sufficient_condition",
    "peak_bound",
    "i_max",
    "critical_r0",
    "crossings",
    "quantifiers",
    "q4_antiderivative",
    "q5_time_parametrization",
    "analyze",
]

TANGENCY_RTOL = 1e-12
Q5_PANELS = 2048
_EVENT_BISECTIONS = 60


@dataclass(frozen=True)
class ThresholdProblem:
    params: SirParams
    init: SirState
    threshold: float

    def __post_init__(self):
        n = self.params.population
        m = self.threshold
        if not (isinstance(m, numbers.Real) and 0 < m < n):
            raise InvalidThreshold(f"threshold M = {m!r} must satisfy 0 < M < N = {n!r}")
        object.__setattr__(self, "threshold", float(m))
        if not self.init.s > 0:
            raise InvalidInitialCondition("S(0) must be positive")
        if not self.init.i > 0:
            raise InvalidInitialCondition("I(0) must be positive")
        _check_state(self.params, self.init)

    @classmethod
    def from_values(cls, n, gamma, r0, s0, i0, m, rr0=0.0) -> "ThresholdProblem":
        return cls(SirParams(n, gamma, r0), SirState(0.0, s0, i0, rr0), m)

    def with_r0(self, r0: float) -> "ThresholdProblem":
        params = SirParams(self.params.population, self.params.gamma, r0)
        return ThresholdProblem(params, self.init, self.threshold)

    def with_threshold(self, m: float) -> "ThresholdProblem":
        return ThresholdProblem(self.params, self.init, m)

    @property
    def n(self) -> float:
        return self.params.population

    @property
    def m(self) -> float:
        return self.threshold

    @property
    def in_peak_regime(self) -> bool:
        """``R0 >= N/S(0)``: the epidemic grows first and the peak formula is exact."""
        return self.params.r0 * self.init.s >= self.params.population


@dataclass(frozen=True)
class CrossingPoints:
    """Where the infected curve enters and leaves the region ``I > M``.

    ``u_i``/``t_i`` mark the entry, ``u_f``/``t_f`` the exit. Because ``u``
    decreases in time, ``u_f <= u* <= u_i`` while ``t_i <= t_f``. Fields are
    ``None`` when the threshold is not exceeded, except at exact tangency,
    where ``u_i = u_f = u*``.
    """

    exceeds: bool
    u_i: float | None = None
    u_f: float | None = None
    t_i: float | None = None
    t_f: float | None = None


@dataclass(frozen=True)
class QuantifierSet:
    q1: float
    q2: float
    q3: float
    q4: float
    q5: float
    r0_critical: float
    i_max: float

    UNITS = {
        "q1": "dimensionless",
        "q2": "persons",
        "q3": "person*time",
        "q4": "persons*u",
        "q5": "persons*arc-length",
    }


def sufficient_condition(problem: ThresholdProblem) -> bool:
    """Cheap one-sided test: ``True`` guarantees ``I_max <= M``.

    Holds when either the epidemic never grows (``R0 <= N/S(0)``) and starts
    at or below ``M``, or ``R0 <= N/(N - M)``, which bounds the peak by
    ``N (1 - 1/R0) <= M``. ``False`` says nothing.
    """
    n, r0 = problem.n, problem.params.r0
    s0, i0, m = problem.init.s, problem.init.i, problem.m
    if r0 <= n / s0:
        return i0 <= m
    return r0 <= n / (n - m)


def peak_bound(problem: ThresholdProblem) -> float:
    """Maximum of ``I`` over the extended parametric curve.

    Always an upper bound for the epidemic peak; equal to it when
    ``R0 >= N/S(0)``.
    """
    n, r0 = problem.n, problem.params.r0
    s0, rr0 = problem.init.s, problem.init.r
    return n / r0 * (math.log(n / (r0 * s0)) - 1.0) - rr0 + n


def i_max(problem: ThresholdProblem) -> float:
    """Peak number of infected, ``(N/R0)(ln(N/(R0 S0)) - 1) - R(0) + N``.

    Raises
    ------
    RegimeError
        If ``R0 < N/S(0)``; there the infected curve only decreases and the
        expression is merely an upper bound.
    """
    if not problem.in_peak_regime:
        raise RegimeError(
            f"R0 = {problem.params.r0!r} < N/S(0) = {problem.n / problem.init.s!r}; "
            "peak formula is only an upper bound"
        )
    return peak_bound(problem)


def _check_attainable(problem: ThresholdProblem) -> None:
    i0, m = problem.init.i, problem.m
    if m <= i0:
        raise InvalidThreshold(f"M = {m!r} <= I(0) = {i0!r}: threshold already reached at t = 0")
    if m >= problem.init.s + i0:
        raise InvalidThreshold(
            f"M = {m!r} >= S(0) + I(0) = {problem.init.s + i0!r}: threshold cannot be reached"
        )


def critical_r0(problem: ThresholdProblem) -> float:
    """Reproduction number whose epidemic peaks exactly at ``M``.

    ``R0* = N W_{-1}(d / (S0 e)) / d`` with ``d = M - N + R(0)``. The threshold
    is exceeded iff ``R0 > R0*``. Independent of ``problem.params.r0``.
    """
    _check_attainable(problem)
    d = problem.m - problem.n + problem.init.r
    z = d / (problem.init.s * math.e)
    return problem.n * lambert_w(Branch.LOWER, z) / d


def _u_crossings(problem: ThresholdProblem, curve: ParametricCurve) -> CrossingPoints:
    n = problem.n
    if not problem.in_peak_regime:
        # I decreases from I(0) < M; the curve maximum lies before t = 0.
        return CrossingPoints(False)
    gap = peak_bound(problem) - problem.m
    if abs(gap) <= TANGENCY_RTOL * n:
        return CrossingPoints(False, curve.u_star, curve.u_star)
    if gap < 0:
        return CrossingPoints(False)
    ratio = problem.params.r0 / n
    roots = solve_log_linear(ratio * curve.x0, ratio * (problem.m - n))
    if roots.count != 2:
        raise ArithmeticError(f"expected two threshold crossings, found {roots.count}")
    u_f, u_i = roots.roots
    return CrossingPoints(True, u_i, u_f)


@dataclass(frozen=True)
class _TimeEvents:
    t_i: float
    t_f: float
    k_i: int            # grid cell containing the entry
    k_f: int            # grid cell containing the exit
    entry: SirState
    exit: SirState


def _refine_event(params: SirParams, left: SirState, dt: float, level: float, rising: bool) -> SirState:
    """Bisect on the RK4 sub-step ``h`` in ``[0, dt]`` for ``I(t_k + h) = level``."""
    lo, hi = 0.0, dt
    for _ in range(_EVENT_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        above = rk4_step(params, left, mid).i >= level
        if above == rising:
            hi = mid
        else:
            lo = mid
    h = 0.5 * (lo + hi)
    return rk4_step(params, left, h)


def _time_events(problem: ThresholdProblem, trajectory: Trajectory) -> _TimeEvents | None:
    level = problem.m
    above = trajectory.i >= level
    if not above.any():
        return None
    first = int(np.argmax(above))
    last = len(above) - 1 - int(np.argmax(above[::-1]))
    if first == 0:
        raise InvalidThreshold("trajectory starts at or above the threshold")
    if last == len(above) - 1:
        raise InvalidArgument(
            "trajectory ends above the threshold; increase t_max to cover the exceedance"
        )
    k_i, k_f = first - 1, last
    params, dt = problem.params, trajectory.dt
    entry = _refine_event(params, trajectory[k_i], dt, level, rising=True)
    exit_ = _refine_event(params, trajectory[k_f], dt, level, rising=False)
    return _TimeEvents(entry.t, exit_.t, k_i, k_f, entry, exit_)


def crossings(problem: ThresholdProblem, trajectory: Trajectory | None = None) -> CrossingPoints:
    """Threshold entry and exit in both ``u`` and time.

    The ``u`` crossings are the two roots of ``I(u) = M`` from the Lambert W
    closed form. Time crossings come from a sign-change scan of ``I(t) - M``
    on the trajectory grid; each bracketing cell is then re-integrated with a
    shorter RK4 step chosen by bisection. Pass ``trajectory=None`` to skip the
    time crossings.
    """
    _check_attainable(problem)
    curve = build_curve(problem.params, problem.init)
    cp = _u_crossings(problem, curve)
    if not cp.exceeds or trajectory is None:
        return cp
    events = _time_events(problem, trajectory)
    if events is None:
        # Peak overshoot smaller than the grid can resolve.
        t_peak = float(trajectory.t[trajectory.peak_index()])
        return CrossingPoints(True, cp.u_i, cp.u_f, t_peak, t_peak)
    return CrossingPoints(True, cp.u_i, cp.u_f, events.t_i, events.t_f)


def _excess_samples(problem: ThresholdProblem, trajectory: Trajectory, events: _TimeEvents):
    """States on ``[t_i, t_f]``: the two events plus the grid points between."""
    inner = trajectory.data[events.k_i + 1:events.k_f + 1]
    rows = [(events.entry.t, events.entry.s, events.entry.i, events.entry.r)]
    rows.extend(map(tuple, inner))
    rows.append((events.exit.t, events.exit.s, events.exit.i, events.exit.r))
    return np.array(rows)


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(0.5 * np.sum((y[1:] + y[:-1]) * np.diff(x)))


def _q3(problem: ThresholdProblem, trajectory: Trajectory, events: _TimeEvents | None) -> float:
    if events is None:
        return 0.0
    rows = _excess_samples(problem, trajectory, events)
    return _trapezoid(rows[:, 2] - problem.m, rows[:, 0])


def q4_antiderivative(problem: ThresholdProblem, x0: float, u: float) -> float:
    """Antiderivative of ``I(u) - M`` in ``u``."""
    c = problem.n / problem.params.r0
    return c * (u * math.log(u) - u) - 0.5 * x0 * u * u + (problem.n - problem.m) * u


def _q5_u(problem: ThresholdProblem, curve: ParametricCurve, cp: CrossingPoints, panels: int) -> float:
    return simpson_excess_converged(
        problem.n / problem.params.r0, curve.x0, problem.n - problem.m,
        cp.u_f, cp.u_i, arc=True, panels=panels,
    )


def q5_time_parametrization(problem: ThresholdProblem, trajectory: Trajectory) -> float:
    """Line integral of ``I - M`` over the exceedance, parametrised by time.

    ``int (I(t) - M) |r'(t)| dt`` with the speed taken from the model's
    right-hand side, by the trapezoid rule on the trajectory grid. Serves as a
    cross-check on the ``u``-parametrised value.
    """
    cp = crossings(problem, None)
    if not cp.exceeds:
        return 0.0
    events = _time_events(problem, trajectory)
    if events is None:
        return 0.0
    rows = _excess_samples(problem, trajectory, events)
    k = problem.params.infection_coefficient
    g = problem.params.gamma
    flux_in = k * rows[:, 1] * rows[:, 2]
    flux_out = g * rows[:, 2]
    speed = np.sqrt(flux_in ** 2 + (flux_in - flux_out) ** 2 + flux_out ** 2)
    return _trapezoid((rows[:, 2] - problem.m) * speed, rows[:, 0])


def _solve(problem, trajectory, dt, t_max, panels):
    r0_star = critical_r0(problem)
    peak = i_max(problem)
    curve = build_curve(problem.params, problem.init)
    cp = _u_crossings(problem, curve)
    q1 = problem.params.r0 - r0_star
    q2 = peak - problem.m
    if not cp.exceeds:
        return QuantifierSet(q1, q2, 0.0, 0.0, 0.0, r0_star, peak), cp
    if trajectory is None:
        trajectory = integrate(problem.params, problem.init, t_max=t_max, dt=dt)
    events = _time_events(problem, trajectory)
    q3 = _q3(problem, trajectory, events)
    q4 = q4_antiderivative(problem, curve.x0, cp.u_i) - q4_antiderivative(problem, curve.x0, cp.u_f)
    q5 = _q5_u(problem, curve, cp, panels)
    if events is None:
        t_peak = float(trajectory.t[trajectory.peak_index()])
        cp = CrossingPoints(True, cp.u_i, cp.u_f, t_peak, t_peak)
    else:
        cp = CrossingPoints(True, cp.u_i, cp.u_f, events.t_i, events.t_f)
    return QuantifierSet(q1, q2, q3, q4, q5, r0_star, peak), cp


def quantifiers(
    problem: ThresholdProblem,
    trajectory: Trajectory | None = None,
    *,
    dt: float | None = None,
    t_max: float | None = None,
    panels: int = Q5_PANELS,
) -> QuantifierSet:
    """All five exceedance quantifiers.

    ``q3`` needs a trajectory; one is integrated with ``dt``/``t_max`` (module
    defaults when ``None``) unless given. ``panels`` is the starting Simpson
    panel count for ``q5``.

    Raises
    ------
    InvalidThreshold
        ``M`` outside ``(I(0), S(0) + I(0))``.
    RegimeError
        ``R0 < N/S(0)``.
    """
    return _solve(problem, trajectory, dt, t_max, panels)[0]


@dataclass(frozen=True)
class AnalysisReport:
    problem: ThresholdProblem
    quantifiers: QuantifierSet
    crossings: CrossingPoints

    @property
    def exceeds(self) -> bool:
        return self.crossings.exceeds

    def to_dict(self) -> dict:
        p, q, cp = self.problem, self.quantifiers, self.crossings
        show = cp.exceeds
        return {
            "r0": p.params.r0,
            "gamma": p.params.gamma,
            "n": p.n,
            "s0": p.init.s,
            "i0": p.init.i,
            "rr0": p.init.r,
            "m": p.m,
            "r0_critical": q.r0_critical,
            "i_max": q.i_max,
            "exceeds": cp.exceeds,
            "u_i": cp.u_i if show else None,
            "u_f": cp.u_f if show else None,
            "t_i": cp.t_i if show else None,
            "t_f": cp.t_f if show else None,
            "q1": q.q1,
            "q2": q.q2,
            "q3": q.q3,
            "q4": q.q4,
            "q5": q.q5,
        }


def analyze(
    problem: ThresholdProblem,
    *,
    dt: float | None = None,
    t_max: float | None = None,
    panels: int = Q5_PANELS,
) -> AnalysisReport:
    """End-to-end report: critical ``R0``, peak, crossings and quantifiers."""
    qs, cp = _solve(problem, None, dt, t_max, panels)
    return AnalysisReport(problem, qs, cp)
