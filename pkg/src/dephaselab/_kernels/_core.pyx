# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (see _numpy.py for the
reference formulas)."""

from libc.math cimport cos, sin, exp, sqrt, M_PI

import numpy as np


def discrete_gamma(gsq, omega, t):
    cdef double[::1] g = np.ascontiguousarray(gsq, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    out = np.empty(tt.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc, ti
    for i in range(tt.shape[0]):
        ti = tt[i]
        acc = 0.0
        for j in range(g.shape[0]):
            acc += g[j] * (1.0 - cos(w[j] * ti))
        o[i] = 4.0 * acc
    return out


def gaussian_kernel_sum(gaps, weights, omega_grid, double sigma):
    cdef double[::1] x = np.ascontiguousarray(gaps, dtype=np.float64)
    cdef double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] om = np.ascontiguousarray(omega_grid, dtype=np.float64)
    out = np.empty(om.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc, z, norm, inv_s
    norm = 1.0 / (sigma * sqrt(2.0 * M_PI))
    inv_s = 1.0 / sigma
    for i in range(om.shape[0]):
        acc = 0.0
        for j in range(x.shape[0]):
            z = (x[j] - om[i]) * inv_s
            acc += wt[j] * exp(-0.5 * z * z)
        o[i] = norm * acc
    return out


def weighted_phase_sum(phases, weights, t):
    cdef double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    out = np.empty(tt.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t i, j
    cdef double re, im, arg, ti
    for i in range(tt.shape[0]):
        ti = tt[i]
        re = 0.0
        im = 0.0
        for j in range(ph.shape[0]):
            arg = ph[j] * ti
            re += wt[j] * cos(arg)
            im += wt[j] * sin(arg)
        o[i] = re + 1j * im
    return out
