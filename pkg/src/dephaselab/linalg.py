"""Dense Hermitian eigendecomposition and unitary time propagation.

Thin, contract-enforcing layer over LAPACK (via numpy.linalg.eigh).  The
propagators here deliberately reuse a single decomposition across a whole
time grid, which is where the oracle spends its time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure

__all__ = ["HermitianMatrix", "EigenPair", "eig", "evolve", "Propagator"]

_HERM_ATOL = 1e-12


@dataclass(frozen=True)
class HermitianMatrix:
    """A validated Hermitian matrix (symmetrized on construction)."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if np.abs(a - a.conj().T).max(initial=0.0) > _HERM_ATOL * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "data", 0.5 * (a + a.conj().T))

    @property
    def n(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EigenPair:
    """Ascending eigenvalues and the unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig(A: HermitianMatrix) -> EigenPair:
    """Full eigendecomposition with a deterministic phase convention.

    Each eigenvector's largest-magnitude component is made real positive so
    repeated runs (and golden tests) see identical output.
    """
    try:
        w, v = np.linalg.eigh(A.data)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    idx = np.abs(v).argmax(axis=0)
    anchors = v[idx, np.arange(v.shape[1])]
    phases = anchors / np.abs(anchors)
    v = v / phases
    return EigenPair(eigenvalues=w, eigenvectors=v)


def evolve(A: HermitianMatrix, t: float, v: np.ndarray) -> np.ndarray:
    """exp(-i*A*t) @ v via eigendecomposition."""
    return Propagator(A).apply(t, v)


class Propagator:
    """Caches one eigendecomposition of A for many exp(-i*A*t) products."""

    def __init__(self, A: HermitianMatrix):
        self._pair = eig(A)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._pair.eigenvalues

    def apply(self, t: float, v: np.ndarray) -> np.ndarray:
        vec = np.asarray(v, dtype=complex)
        if vec.shape[0] != self._pair.eigenvalues.shape[0]:
            raise ValueError("vector dimension mismatch")
        U = self._pair.eigenvectors
        coeffs = U.conj().T @ vec
        return U @ (np.exp(-1j * self._pair.eigenvalues * t) * coeffs)
