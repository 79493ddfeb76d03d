"""Hot numerical loops with a compiled core and a NumPy fallback.

The Cython extension ``_core`` is optional: if it was not built (or if
``DEPHASELAB_PURE_PYTHON=1`` is set) the NumPy implementations in
``_numpy`` are used instead.  Both backends are exact re-implementations
of the same formulas; ``tests/test_kernels.py`` checks parity and
``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

if os.environ.get("DEPHASELAB_PURE_PYTHON"):
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

discrete_gamma = _impl.discrete_gamma
gaussian_kernel_sum = _impl.gaussian_kernel_sum
weighted_phase_sum = _impl.weighted_phase_sum

__all__ = [
    "BACKEND",
    "discrete_gamma",
    "gaussian_kernel_sum",
    "weighted_phase_sum",
]
