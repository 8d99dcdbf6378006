"""Composite Simpson rules."""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import _backend


def composite_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> float:
    """Composite Simpson's rule for a vectorised integrand on ``[a, b]``."""
    if panels < 2 or panels % 2:
        raise ValueError("panels must be an even integer >= 2")
    h = (b - a) / panels
    x = a + np.arange(panels + 1) * h
    y = np.asarray(f(x), dtype=np.float64)
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def simpson_excess_converged(
    c: float,
    x0: float,
    level: float,
    lo: float,
    hi: float,
    *,
    arc: bool,
    panels: int = 2048,
    rtol: float = 1e-9,
    max_panels: int = 2**20,
) -> float:
    """Simpson estimate of ``int (c ln u - x0 u + level) [* speed] du``.

    The panel count doubles from ``panels`` until two successive estimates
    agree to ``rtol`` or ``max_panels`` is reached.
    """
    if panels < 2 or panels % 2:
        raise ValueError("panels must be an even integer >= 2")
    prev = _backend.simpson_excess(c, x0, level, lo, hi, panels, arc)
    while panels < max_panels:
        panels *= 2
        cur = _backend.simpson_excess(c, x0, level, lo, hi, panels, arc)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    return prev
