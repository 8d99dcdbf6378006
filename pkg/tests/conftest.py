"""Shared fixtures and independent numerical oracles.

The oracles here deliberately avoid the package's own machinery: plain
bisection, a textbook Simpson rule and scipy's adaptive ODE solver.
"""
import math

import numpy as np
import pytest

from sirthreshold import ThresholdProblem

N = 100.0
GAMMA = 1.0 / 3.0


def bisect(f, lo, hi, tol=1e-14, maxiter=400):
    """Root of ``f`` on a sign-changing bracket."""
    flo = f(lo)
    if flo == 0:
        return lo
    fhi = f(hi)
    assert flo * fhi < 0, "bracket does not change sign"
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0 or hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def simpson(f, a, b, panels):
    """Composite Simpson's rule, written out independently of the package."""
    h = (b - a) / panels
    x = np.linspace(a, b, panels + 1)
    y = f(x)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return h / 3.0 * float(np.dot(w, y))


def closed_form_peak(n, r0, s0, rr0=0.0):
    return n / r0 * (math.log(n / (r0 * s0)) - 1.0) - rr0 + n


def solve_ivp_sir(n, gamma, r0, s0, i0, rr0, t_end):
    """High-accuracy adaptive reference solution with dense output."""
    from scipy.integrate import solve_ivp

    k = gamma * r0 / n

    def rhs(t, y):
        s, i, _ = y
        return [-k * s * i, k * s * i - gamma * i, gamma * i]

    return solve_ivp(rhs, (0.0, t_end), [s0, i0, rr0], method="DOP853",
                     rtol=1e-12, atol=1e-12 * n, dense_output=True)


def random_exceeding_problem(rng, n=N, r0_max=8.0):
    """Random scenario with a genuine exceedance well away from tangency."""
    gamma = rng.uniform(0.1, 1.0)
    i0 = rng.uniform(0.5, 5.0)
    rr0 = rng.uniform(0.0, 10.0)
    s0 = n - i0 - rr0
    r0 = rng.uniform(n / s0 + 0.05, r0_max)
    peak = closed_form_peak(n, r0, s0, rr0)
    m = rng.uniform(i0 + 0.1 * (peak - i0), peak - 0.05 * (peak - i0))
    return ThresholdProblem.from_values(n, gamma, r0, s0, i0, m, rr0)


def random_valid_problem(rng, n=N):
    """Random problem in the peak regime with an attainable threshold."""
    gamma = rng.uniform(0.1, 1.0)
    i0 = rng.uniform(0.5, 5.0)
    rr0 = rng.uniform(0.0, 10.0)
    s0 = n - i0 - rr0
    r0 = rng.uniform(n / s0 + 0.01, 8.0)
    m = rng.uniform(i0 + 0.5, s0 + i0 - 0.5)
    return ThresholdProblem.from_values(n, gamma, r0, s0, i0, m, rr0)


@pytest.fixture
def example1():
    """Population 100, gamma 1/3, one initial case, capacity 10."""
    return ThresholdProblem.from_values(N, GAMMA, 2.5, 99.0, 1.0, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_record():
    def record(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"criterion {number:>2}: {status}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


