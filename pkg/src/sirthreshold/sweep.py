"""Parameter sweeps over ``(R0, M)`` grids and ``R0`` profiles.

Cells are independent, so a sweep can fan out over worker processes; results
are always assembled in row-major order (``R0`` outer, ``M`` inner) and do
not depend on the worker count.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .errors import InvalidRange, SirThresholdError
from .sir import SirParams, SirState
from .threshold import Q5_PANELS, ThresholdProblem, critical_r0, quantifiers

__all__ = [
    "SweepGrid",
    "SweepCell",
    "ProfileTable",
    "axis",
    "sweep",
    "grid_values",
    "r0_profile",
    "write_sweep_csv",
    "write_profile_csv",
]

QUANTIFIERS = ("q1", "q2", "q3", "q4", "q5")
LOG_DERIVATIVE_FLOOR = 1e-12


def axis(lo: float, hi: float, count: int) -> list[float]:
    """``count`` evenly spaced values from ``lo`` to ``hi`` inclusive.

    Sample ``k`` is ``lo + k*step``, so doubling the resolution
    (``2*count - 1`` points) reproduces every old sample bit for bit.
    """
    if count < 1:
        raise InvalidRange("axis needs at least one point")
    if count == 1:
        if lo != hi:
            raise InvalidRange(f"a single-point axis needs min == max, got [{lo}, {hi}]")
        return [float(lo)]
    if not hi > lo:
        raise InvalidRange(f"axis range [{lo}, {hi}] is empty")
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count - 1)] + [float(hi)]


@dataclass(frozen=True)
class SweepGrid:
    r0_range: tuple[float, float, int]
    m_range: tuple[float, float, int]
    n: float
    gamma: float
    s0: float
    i0: float
    rr0: float = 0.0

    def __post_init__(self):
        # Build a throwaway problem to validate the base fields.
        self.problem(self.r0_values[0], self.m_values[0])
        m_lo, m_hi = self.m_range[0], self.m_range[1]
        if not m_lo > self.i0:
            raise InvalidRange(f"m-min = {m_lo!r} must exceed I(0) = {self.i0!r}")
        if not m_hi < self.s0 + self.i0:
            raise InvalidRange(f"m-max = {m_hi!r} must be below S(0) + I(0) = {self.s0 + self.i0!r}")

    @property
    def r0_values(self) -> list[float]:
        return axis(*self.r0_range)

    @property
    def m_values(self) -> list[float]:
        return axis(*self.m_range)

    @property
    def shape(self) -> tuple[int, int]:
        return self.r0_range[2], self.m_range[2]

    def problem(self, r0: float, m: float) -> ThresholdProblem:
        return ThresholdProblem(
            SirParams(self.n, self.gamma, r0),
            SirState(0.0, self.s0, self.i0, self.rr0),
            m,
        )


@dataclass(frozen=True)
class SweepCell:
    """Quantifiers at one grid point; ``nan`` marks an invalid regime."""

    r0: float
    m: float
    q1: float
    q2: float
    q3: float
    q4: float
    q5: float
    note: str = field(default="", compare=False)

    @property
    def values(self) -> tuple[float, ...]:
        return self.q1, self.q2, self.q3, self.q4, self.q5


def _evaluate(job) -> SweepCell:
    problem, options = job
    r0, m = problem.params.r0, problem.m
    try:
        qs = quantifiers(problem, **options)
    except SirThresholdError as exc:
        nan = math.nan
        return SweepCell(r0, m, nan, nan, nan, nan, nan, note=type(exc).__name__)
    return SweepCell(r0, m, qs.q1, qs.q2, qs.q3, qs.q4, qs.q5)


def _run(jobs: list, workers: int) -> list[SweepCell]:
    if workers <= 1 or len(jobs) <= 1:
        return [_evaluate(job) for job in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, jobs, chunksize=chunk))


def sweep(
    grid: SweepGrid,
    *,
    workers: int = 1,
    dt: float | None = None,
    t_max: float | None = None,
    panels: int = Q5_PANELS,
) -> list[SweepCell]:
    """Evaluate every grid cell; row-major with ``R0`` as the slow index."""
    options = {"dt": dt, "t_max": t_max, "panels": panels}
    jobs = [(grid.problem(r0, m), options) for r0 in grid.r0_values for m in grid.m_values]
    return _run(jobs, workers)


def grid_values(cells: Sequence[SweepCell], grid: SweepGrid, name: str) -> np.ndarray:
    """Reshape one quantifier into an ``(n_r0, n_m)`` array."""
    return np.array([getattr(c, name) for c in cells]).reshape(grid.shape)


def write_sweep_csv(cells: Sequence[SweepCell], fp: TextIO) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["r0", "m", *QUANTIFIERS])
    for c in cells:
        writer.writerow([f"{v:.17g}" for v in (c.r0, c.m, *c.values)])


@dataclass(frozen=True, eq=False)
class ProfileTable:
    """Quantifiers along an ``R0`` axis.

    ``q``, ``dq``, ``nq`` and ``lq`` have shape ``(len(r0), 5)``: values,
    finite-difference derivatives in ``R0``, values normalised by the last
    row, and logarithmic derivatives ``dq/q`` (``nan`` where ``q`` is ~0).
    """

    r0: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    nq: np.ndarray
    lq: np.ndarray
    r0_critical: float

    def column(self, kind: str, index: int) -> np.ndarray:
        return getattr(self, kind)[:, index - 1]


def _finite_difference(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (x[2:, None] - x[:-2, None])
    d[0] = (y[1] - y[0]) / (x[1] - x[0])
    d[-1] = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return d


def r0_profile(
    template: ThresholdProblem,
    r0_min: float | None,
    r0_max: float,
    count: int,
    *,
    workers: int = 1,
    dt: float | None = None,
    t_max: float | None = None,
    panels: int = Q5_PANELS,
) -> ProfileTable:
    """Quantifiers, derivatives and normalised values for ``R0`` in a range.

    ``r0_min=None`` starts the range at the critical value. The range must not
    dip below it, since the quantifiers are compared on the exceedance side.
    """
    r0_star = critical_r0(template)
    if r0_min is None:
        r0_min = r0_star
    if r0_min < r0_star:
        raise InvalidRange(f"r0-min = {r0_min!r} is below the critical value {r0_star!r}")
    if count < 3:
        raise InvalidRange("profile needs at least 3 points")
    r0s = axis(r0_min, r0_max, count)
    options = {"dt": dt, "t_max": t_max, "panels": panels}
    cells = _run([(template.with_r0(r), options) for r in r0s], workers)
    for c in cells:
        if c.note:
            raise InvalidRange(f"profile point R0 = {c.r0!r} is invalid ({c.note})")

    r = np.array(r0s)
    q = np.array([c.values for c in cells])
    dq = _finite_difference(q, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        nq = q / q[-1]
        lq = np.where(q > LOG_DERIVATIVE_FLOOR, dq / q, math.nan)
    return ProfileTable(r, q, dq, nq, lq, r0_star)


def write_profile_csv(table: ProfileTable, fp: TextIO) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    header = ["r0"]
    for prefix in ("q", "dq", "nq", "lq"):
        header += [f"{prefix}{k}" for k in range(1, 6)]
    writer.writerow(header)
    for k, r in enumerate(table.r0):
        row = [r, *table.q[k], *table.dq[k], *table.nq[k], *table.lq[k]]
        writer.writerow([f"{v:.17g}" for v in row])
