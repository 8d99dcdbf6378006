"""SIR model: time-domain integration and the u-parametrised solution curve.

The model is written in terms of the basic reproduction number::

    dS/dt = -gamma R0 S I / N
    dI/dt =  gamma R0 S I / N - gamma I
    dR/dt =  gamma I

Along a solution, ``u = exp(-(R0/N) R)`` gives the exact parametrisation::

    S(u) = x0 u
    I(u) = (N/R0) ln u - x0 u + N
    R(u) = -(N/R0) ln u

with ``x0 = S(0) exp((R0/N) R(0))``. Time runs forward as ``u`` decreases
from ``u0`` to ``u_inf``.
"""
from __future__ import annotations

import csv
import io
import math
import numbers
import sys
from dataclasses import dataclass, field
from typing import Iterator, TextIO

import numpy as np

from . import _backend
from .errors import DomainError, InvalidArgument, InvalidInitialCondition
from .lambertw import solve_log_linear

__all__ = [
    "SirParams",
    "SirState",
    "Trajectory",
    "ParametricCurve",
    "derivatives",
    "integrate",
    "parametric_state",
    "build_curve",
    "default_dt",
    "default_t_max",
]

CONSERVATION_RTOL = 1e-9
BURNOUT_RECOVERY_TIMES = 60.0
DT_RECOVERY_FRACTION = 1e-3


@dataclass(frozen=True)
class SirParams:
    """Model constants.

    Attributes
    ----------
    population : float
        Total population ``N``.
    gamma : float
        Recovery rate (1/time).
    r0 : float
        Basic reproduction number ``beta N / gamma``.
    """

    population: float
    gamma: float
    r0: float

    def __post_init__(self):
        for name in ("population", "gamma", "r0"):
            value = getattr(self, name)
            if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
                raise InvalidArgument(f"{name} must be a positive finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.r0 <= self.population * sys.float_info.epsilon:
            raise InvalidArgument(f"r0 = {self.r0!r} is degenerate for N = {self.population!r}")

    @classmethod
    def from_beta(cls, population: float, gamma: float, beta: float) -> "SirParams":
        return cls(population, gamma, beta * population / gamma)

    @property
    def beta(self) -> float:
        """Transmission rate ``gamma R0 / N`` (1/(person time))."""
        return self.gamma * self.r0 / self.population

    @property
    def infection_coefficient(self) -> float:
        return self.gamma * self.r0 / self.population


@dataclass(frozen=True)
class SirState:
    t: float
    s: float
    i: float
    r: float

    @property
    def total(self) -> float:
        return self.s + self.i + self.r


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Fixed-step samples ``(t, S, I, R)``; ``data`` has shape ``(n, 4)``."""

    data: np.ndarray = field(repr=False)
    dt: float

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != 4:
            raise InvalidArgument("trajectory data must have shape (n, 4)")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    @property
    def s(self) -> np.ndarray:
        return self.data[:, 1]

    @property
    def i(self) -> np.ndarray:
        return self.data[:, 2]

    @property
    def r(self) -> np.ndarray:
        return self.data[:, 3]

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, k: int) -> SirState:
        t, s, i, r = self.data[k]
        return SirState(float(t), float(s), float(i), float(r))

    def __iter__(self) -> Iterator[SirState]:
        return (self[k] for k in range(len(self)))

    def peak_index(self) -> int:
        return int(np.argmax(self.i))

    def to_csv(self, fp: TextIO) -> None:
        """Write ``t,S,I,R`` rows with 17 significant digits."""
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["t", "S", "I", "R"])
        for row in self.data:
            writer.writerow([f"{v:.17g}" for v in row])

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


@dataclass(frozen=True)
class ParametricCurve:
    """Anchors of the extended solution curve in the ``u`` parameter."""

    x0: float
    u0: float
    u_inf: float
    u_star: float
    removed_final: float


def default_dt(params: SirParams) -> float:
    return DT_RECOVERY_FRACTION / params.gamma


def default_t_max(params: SirParams) -> float:
    return BURNOUT_RECOVERY_TIMES / params.gamma


def derivatives(params: SirParams, state: SirState) -> tuple[float, float, float]:
    """Right-hand side of the SIR system at ``state``."""
    infection = params.infection_coefficient * state.s * state.i
    recovery = params.gamma * state.i
    return -infection, infection - recovery, recovery


def _check_state(params: SirParams, state: SirState) -> None:
    for name in ("s", "i", "r"):
        value = getattr(state, name)
        if not (math.isfinite(value) and value >= 0):
            raise InvalidArgument(f"initial {name.upper()} must be non-negative, got {value!r}")
    n = params.population
    if abs(state.total - n) > CONSERVATION_RTOL * n:
        raise InvalidArgument(f"S + I + R = {state.total!r} differs from N = {n!r}")


def integrate(
    params: SirParams,
    init: SirState,
    t_max: float | None = None,
    dt: float | None = None,
) -> Trajectory:
    """Classical RK4 with a fixed step from ``init.t`` to at least ``t_max``.

    Defaults are ``dt = 1e-3/gamma`` and ``t_max = 60/gamma``. Sample ``k`` is
    at ``init.t + k*dt``; the last sample is the first grid point ``>= t_max``.
    """
    dt = default_dt(params) if dt is None else float(dt)
    t_max = default_t_max(params) if t_max is None else float(t_max)
    if not (dt > 0 and math.isfinite(dt)):
        raise InvalidArgument(f"dt must be positive, got {dt!r}")
    if not t_max > init.t:
        raise InvalidArgument(f"t_max = {t_max!r} must exceed the initial time {init.t!r}")
    _check_state(params, init)
    nsteps = max(1, math.ceil((t_max - init.t) / dt - 1e-9))
    data = _backend.rk4_sir(
        params.infection_coefficient, params.gamma,
        float(init.s), float(init.i), float(init.r),
        float(init.t), dt, nsteps,
    )
    return Trajectory(data, dt)


def rk4_step(params: SirParams, state: SirState, h: float) -> SirState:
    """Advance ``state`` by one RK4 step of size ``h``."""
    row = _backend.rk4_sir(
        params.infection_coefficient, params.gamma,
        state.s, state.i, state.r, state.t, h, 1,
    )[1]
    return SirState(float(row[0]), float(row[1]), float(row[2]), float(row[3]))


def parametric_state(curve: ParametricCurve, params: SirParams, u: float) -> tuple[float, float, float]:
    """``(S, I, R)`` on the extended curve at parameter ``u > 0``."""
    if not u > 0:
        raise DomainError(f"u must be positive, got {u!r}")
    c = params.population / params.r0
    log_u = math.log(u)
    s = curve.x0 * u
    return s, c * log_u - s + params.population, -c * log_u


def build_curve(params: SirParams, init: SirState) -> ParametricCurve:
    """Parametric anchors for the epidemic started at ``init``.

    ``u_inf`` is the root of ``I(u) = 0`` below the curve maximum ``u*``; it is
    the endpoint reached as ``t -> inf``.
    """
    if not init.s > 0:
        raise InvalidInitialCondition("S(0) must be positive")
    if not init.i > 0:
        raise InvalidInitialCondition("I(0) must be positive")
    n, r0 = params.population, params.r0
    ratio = r0 / n
    x0 = init.s * math.exp(ratio * init.r)
    u0 = math.exp(-ratio * init.r)
    u_star = n / (r0 * x0)
    roots = solve_log_linear(ratio * x0, -r0)
    # I(0) > 0 guarantees two roots bracketing u0.
    u_inf = roots.roots[0]
    return ParametricCurve(
        x0=x0,
        u0=u0,
        u_inf=u_inf,
        u_star=u_star,
        removed_final=-math.log(u_inf) / ratio,
    )
