"""dephaselab: a numerical laboratory for exactly solvable pure-dephasing
models -- the spin-boson model with power-law couplings and random-level
("chaotic vs regular") environments.

Subpackages
-----------
specfun    closed-form norms, energies, dephasing exponents, spectral densities
quad       certified adaptive quadrature for singular/oscillatory integrands
linalg     dense Hermitian eigendecomposition and unitary propagation
fock       truncated-Fock brute-force oracle for the spin-boson dynamics
rmt        level ensembles, spacing statistics, smoothed spectral function
meanfield  finite-N mean-field dephasing simulation
cli        reproducible command-line front end
"""

__version__ = "0.1.0"

from . import _kernels, fock, linalg, meanfield, quad, rmt, specfun  # noqa: F401
from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
