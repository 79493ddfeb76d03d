"""Build script for the optional compiled kernels.

The package works without compilation (a NumPy fallback is selected at
import time); building the Cython extension just makes the hot loops
faster.  `pip install -e . --no-build-isolation` compiles it when Cython
and a C compiler are available.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/dephaselab/_kernels/_core.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
