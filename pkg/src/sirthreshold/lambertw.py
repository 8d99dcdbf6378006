"""Real branches of the Lambert W function and the log-linear equations it solves.

``W(x)`` is the inverse relation of ``w -> w * exp(w)``. On the reals it is
defined for ``x >= -1/e`` and has two branches:

* ``Branch.PRINCIPAL`` (``W_0``), defined on ``[-1/e, inf)`` with ``W_0 >= -1``;
* ``Branch.LOWER`` (``W_{-1}``), defined on ``[-1/e, 0)`` with ``W_{-1} <= -1``.

Values are obtained with Halley's method from asymptotic/series starting
points. Inside a tiny window around the branch point the series alone is used
since Halley's update degenerates at the double root.
"""
from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

from .errors import DomainError, InvalidArgument

__all__ = [
    "Branch",
    "LogLinearSolutions",
    "lambert_w",
    "solve_log_linear",
    "solve_xlogx",
]

# 1/e split in two doubles so that x + 1/e is formed without cancellation.
_INV_E_HI = 0.36787944117144233
_INV_E_LO = -1.2428753672788363e-17
_BRANCH_POINT = -_INV_E_HI

_DOMAIN_SLACK = 1e-15
_SERIES_WINDOW = 1e-6
_MAX_ITER = 50
_STEP_TOL = 1e-14

# Relative slack on a*e^(b+1) == 1 when classifying the tangent case.
_TANGENCY_RTOL = 64 * sys.float_info.epsilon

# Coefficients of W(x) = sum c_k p^k, p = +-sqrt(2 (1 + e x)).
_BRANCH_SERIES = (-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0,
                  769.0 / 17280.0, -221.0 / 8505.0)


class Branch(enum.IntEnum):
    """Real branch selector; the integer value is the conventional index k."""

    PRINCIPAL = 0
    LOWER = -1


def _branch_offset(x: float) -> float:
    """Return ``1 + e*x`` accurately near ``x = -1/e``."""
    return math.e * ((x + _INV_E_HI) + _INV_E_LO)


def _branch_series(p: float, terms: int = len(_BRANCH_SERIES)) -> float:
    acc = 0.0
    for c in reversed(_BRANCH_SERIES[:terms]):
        acc = acc * p + c
    return acc


def _halley(x: float, w: float) -> float:
    for _ in range(_MAX_ITER):
        # f(w)/e^w, written so that large |w| neither overflows nor underflows.
        if x == 0.0:
            g = w
        else:
            g = w - math.copysign(math.exp(math.log(abs(x)) - w), x)
        wp1 = w + 1.0
        dw = g / (wp1 - (w + 2.0) * g / (2.0 * wp1))
        w -= dw
        if abs(dw) <= _STEP_TOL * (1.0 + abs(w)):
            break
    return w


def lambert_w(branch: Branch | int, x: float) -> float:
    """Evaluate the real Lambert W function on ``branch`` at ``x``.

    Parameters
    ----------
    branch : Branch or int
        ``Branch.PRINCIPAL`` (0) or ``Branch.LOWER`` (-1).
    x : float
        Argument. ``x >= -1/e`` for both branches and additionally ``x < 0``
        for the lower branch. Values up to ``1e-15`` below ``-1/e`` are
        treated as the branch point.

    Returns
    -------
    float
        ``w`` with ``w * exp(w) == x``.

    Raises
    ------
    DomainError
        If ``x`` is outside the branch's domain.
    """
    branch = Branch(branch)
    x = float(x)
    if math.isnan(x):
        raise DomainError("lambert_w: x is NaN")
    if x < _BRANCH_POINT - _DOMAIN_SLACK:
        raise DomainError(f"lambert_w: x = {x!r} < -1/e")
    if branch is Branch.LOWER and x >= 0.0:
        raise DomainError(f"lambert_w: lower branch requires x < 0, got {x!r}")
    if math.isinf(x):
        return math.inf

    offset = _branch_offset(x)
    if offset <= 0.0:
        return -1.0
    p = math.sqrt(2.0 * offset)
    if branch is Branch.LOWER:
        p = -p
    if abs(x - _BRANCH_POINT) < _SERIES_WINDOW:
        return _branch_series(p)

    if branch is Branch.PRINCIPAL:
        if x == 0.0:
            return 0.0
        if x < -0.25:
            w = _branch_series(p, 4)
        elif abs(x) <= 0.1:
            w = x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)))
        elif x < 3.0:
            w = math.log1p(x)
        else:
            l1 = math.log(x)
            l2 = math.log(l1)
            w = l1 - l2 + l2 / l1
        w = _halley(x, w)
        return max(w, -1.0)

    if x < -0.25:
        w = _branch_series(p, 4)
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    w = _halley(x, w)
    return min(w, -1.0)


@dataclass(frozen=True)
class LogLinearSolutions:
    """Positive roots of a log-linear equation, ascending."""

    roots: tuple[float, ...] = ()

    @property
    def count(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _is_unit(kappa: float) -> bool:
    return abs(kappa - 1.0) <= _TANGENCY_RTOL


def solve_log_linear(a: float, b: float) -> LogLinearSolutions:
    """All positive solutions ``u`` of ``ln(u) = a*u + b``.

    Roots are ``u = W(-a e^b) / (-a)`` over the applicable branches. With
    ``k = a e^(b+1)``: no root when ``k > 1``, a double root ``u = 1/a`` when
    ``k == 1``, two roots when ``0 < k < 1`` and a single root when ``a < 0``.
    """
    a, b = float(a), float(b)
    if a == 0.0:
        raise InvalidArgument("solve_log_linear: a must be nonzero")
    if a < 0.0:
        z = -a * math.exp(b)
        return LogLinearSolutions((lambert_w(Branch.PRINCIPAL, z) / -a,))

    kappa = a * math.exp(b + 1.0)
    if _is_unit(kappa):
        return LogLinearSolutions((1.0 / a,))
    if kappa > 1.0:
        return LogLinearSolutions()
    z = -kappa * _INV_E_HI - kappa * _INV_E_LO
    small = lambert_w(Branch.PRINCIPAL, z) / -a
    large = lambert_w(Branch.LOWER, z) / -a
    return LogLinearSolutions((small, large))


def solve_xlogx(a: float, b: float) -> LogLinearSolutions:
    """All positive solutions ``v`` of ``v ln(v) = a*v + b``.

    Roots are ``v = b / W(b e^(-a))``. With ``k = b e^(1-a)``: no root when
    ``k < -1``, one root ``v = -b`` when ``k == -1``, two when ``-1 < k < 0``
    and one when ``b > 0``.
    """
    a, b = float(a), float(b)
    if b == 0.0:
        raise InvalidArgument("solve_xlogx: b must be nonzero")
    if b > 0.0:
        z = b * math.exp(-a)
        return LogLinearSolutions((b / lambert_w(Branch.PRINCIPAL, z),))

    kappa = -b * math.exp(1.0 - a)
    if _is_unit(kappa):
        return LogLinearSolutions((-b,))
    if kappa > 1.0:
        return LogLinearSolutions()
    z = -kappa * _INV_E_HI - kappa * _INV_E_LO
    small = b / lambert_w(Branch.LOWER, z)
    large = b / lambert_w(Branch.PRINCIPAL, z)
    return LogLinearSolutions((small, large))
