"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``."""
import math

import numpy as np


def rk4_sir(infect, gamma, s, i, r, t0, dt, nsteps):
    """Fixed-step RK4 for the SIR system.

    ``infect`` is the mass-action coefficient ``gamma * R0 / N``. Returns an
    ``(nsteps + 1, 4)`` array of ``t, S, I, R`` rows.
    """
    half = 0.5 * dt
    sixth = dt / 6.0
    rows = [(t0, s, i, r)]
    append = rows.append
    for j in range(1, nsteps + 1):
        # a = infection flux, b = recovery flux
        a1 = infect * s * i
        b1 = gamma * i
        s2 = s - half * a1
        i2 = i + half * (a1 - b1)
        a2 = infect * s2 * i2
        b2 = gamma * i2
        s3 = s - half * a2
        i3 = i + half * (a2 - b2)
        a3 = infect * s3 * i3
        b3 = gamma * i3
        s4 = s - dt * a3
        i4 = i + dt * (a3 - b3)
        a4 = infect * s4 * i4
        b4 = gamma * i4
        s = s - sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        i = i + sixth * ((a1 - b1) + 2.0 * (a2 - b2) + 2.0 * (a3 - b3) + (a4 - b4))
        r = r + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        append((t0 + j * dt, s, i, r))
    return np.array(rows, dtype=np.float64)


def simpson_excess(c, x0, level, lo, hi, panels, arc):
    """Composite Simpson of ``c ln u - x0 u + level`` over ``[lo, hi]``.

    With ``arc`` set the integrand is weighted by the speed of the curve
    ``u -> (x0 u, c ln u - x0 u + N, -c ln u)``.
    """
    h = (hi - lo) / panels
    u = lo + np.arange(panels + 1) * h
    f = c * np.log(u) - x0 * u + level
    if arc:
        q = c / u
        f *= np.sqrt(2.0 * (x0 * x0 + q * (q - x0)))
    ends = f[0] + f[-1]
    odd = math.fsum(f[1:-1:2])
    even = math.fsum(f[2:-1:2])
    return h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
