# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror :mod:`sirthreshold._pykernels`."""
import numpy as np

from libc.math cimport log, sqrt


def rk4_sir(double infect, double gamma, double s, double i, double r,
            double t0, double dt, Py_ssize_t nsteps):
    cdef double[:, ::1] out = np.empty((nsteps + 1, 4), dtype=np.float64)
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef double a1, b1, a2, b2, a3, b3, a4, b4
    cdef double s2, i2, s3, i3, s4, i4
    cdef Py_ssize_t j

    out[0, 0] = t0
    out[0, 1] = s
    out[0, 2] = i
    out[0, 3] = r
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
        out[j, 0] = t0 + j * dt
        out[j, 1] = s
        out[j, 2] = i
        out[j, 3] = r
    return np.asarray(out)


def simpson_excess(double c, double x0, double level, double lo, double hi,
                   Py_ssize_t panels, bint arc):
    cdef double h = (hi - lo) / panels
    cdef double u, f, q, odd = 0.0, even = 0.0
    cdef Py_ssize_t j
    cdef double ends = 0.0

    for j in range(panels + 1):
        u = lo + j * h
        f = c * log(u) - x0 * u + level
        if arc:
            q = c / u
            f *= sqrt(2.0 * (x0 * x0 + q * (q - x0)))
        if j == 0 or j == panels:
            ends += f
        elif j % 2:
            odd += f
        else:
            even += f
    return h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
