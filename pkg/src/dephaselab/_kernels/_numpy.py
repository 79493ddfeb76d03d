"""NumPy fallback implementations of the hot kernels.

Kept in lock-step with ``_core.pyx``; the test suite asserts agreement.
"""

import numpy as np

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def discrete_gamma(gsq, omega, t):
    """Dephasing exponent of a finite-mode bath on a time grid.

    gamma(t) = 4 * sum_j gsq[j] * (1 - cos(omega[j] * t))
    """
    gsq = np.asarray(gsq, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    phases = np.outer(t, omega)
    return 4.0 * ((1.0 - np.cos(phases)) @ gsq)


def gaussian_kernel_sum(gaps, weights, omega_grid, sigma):
    """Weighted Gaussian-kernel density of level gaps on a frequency grid.

    r[i] = sum_j weights[j] * N(omega_grid[i] - gaps[j]; sigma)
    with N a normalized Gaussian of width sigma.
    """
    gaps = np.asarray(gaps, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    omega_grid = np.asarray(omega_grid, dtype=np.float64)
    out = np.empty(omega_grid.size, dtype=np.float64)
    norm = 1.0 / (sigma * _SQRT_2PI)
    # chunk over the grid to keep the temporary small
    for i, w in enumerate(omega_grid):
        z = (gaps - w) / sigma
        out[i] = norm * np.dot(weights, np.exp(-0.5 * z * z))
    return out


def weighted_phase_sum(phases, weights, t):
    """sum_j weights[j] * exp(1j * phases[j] * t) on a time grid."""
    phases = np.asarray(phases, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    return np.exp(1j * np.outer(t, phases)) @ weights.astype(np.complex128)
