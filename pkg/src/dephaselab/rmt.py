"""Random-level environments: ensemble sampling, spacing statistics, and the
kernel-smoothed spectral function of a traceless coupling.

The estimator implements

    R(omega) = (pi/M) * sum_{m != m'} |Q_{mm'}|^2 K_sigma((e_m - e_{m'}) - omega)

averaged over an ensemble of (level set, coupling) realizations, with
bootstrap standard errors.  Diagonal (m = m') terms are excluded: they
contribute a pure delta spike at omega = 0 that is an artifact of finite
kernel smoothing and would bias the omega -> 0 rate extrapolation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import InsufficientSamples

__all__ = [
    "EnsembleKind",
    "LevelEnsemble",
    "LevelSet",
    "CouplingMatrix",
    "SpectralEstimate",
    "RateEstimate",
    "sample_levels",
    "spacing_pdf",
    "spacing_cdf",
    "sample_coupling",
    "estimate_spectral_function",
    "surmise_prediction",
    "rate_estimate",
]

MIN_REALIZATIONS = 20


class EnsembleKind(enum.Enum):
    POISSON_SPACINGS = "poisson"
    GOE_MATRIX = "goe"
    GUE_MATRIX = "gue"
    SURMISE_SPACINGS = "surmise"

    @property
    def is_matrix(self) -> bool:
        return self in (EnsembleKind.GOE_MATRIX, EnsembleKind.GUE_MATRIX)


# Wigner-surmise spacing densities p(s) = c_beta * s^beta * exp(-a_beta s^2),
# unit mean spacing; sampling reduces to a scaled chi distribution with
# beta + 1 degrees of freedom.
_SURMISE = {
    1: (math.pi / 2.0, math.pi / 4.0),
    2: (32.0 / math.pi**2, 4.0 / math.pi),
    4: (2.0**18 / (3.0**6 * math.pi**3), 64.0 / (9.0 * math.pi)),
}


@dataclass(frozen=True)
class LevelEnsemble:
    kind: EnsembleKind
    M: int
    delta: float = 1.0
    beta: Optional[int] = None  # surmise mode only

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.kind.is_matrix and self.M < 16:
            raise ValueError("matrix ensembles need M >= 16")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if self.kind is EnsembleKind.SURMISE_SPACINGS and self.beta not in _SURMISE:
            raise ValueError("surmise mode needs beta in {1, 2, 4}")


@dataclass(frozen=True)
class LevelSet:
    levels: np.ndarray
    provenance: str

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if np.any(np.diff(lv) <= 0):
            raise ValueError("levels must be strictly ascending")
        object.__setattr__(self, "levels", lv)

    @property
    def M(self) -> int:
        return self.levels.size

    def spacings(self) -> np.ndarray:
        return np.diff(self.levels)


def _chi(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    return np.sqrt((rng.standard_normal((n, k)) ** 2).sum(axis=1))


def _sample_surmise_spacings(rng, beta: int, n: int) -> np.ndarray:
    # s = sigma * chi_{beta+1} with sigma fixed by exp(-a s^2) = exp(-x^2/2);
    # the chi normalization then gives unit mean automatically.
    a = _SURMISE[beta][1]
    return math.sqrt(0.5 / a) * _chi(rng, beta + 1, n)


def _unfolded_matrix_levels(rng, kind: EnsembleKind, M: int) -> np.ndarray:
    """Central M levels of a 2M x 2M Gaussian matrix, unfolded to unit mean
    spacing by a degree-7 polynomial fit of the spectral staircase."""
    L = 2 * M
    if kind is EnsembleKind.GOE_MATRIX:
        A = rng.standard_normal((L, L))
        H = (A + A.T) / 2.0
    else:
        A = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
        H = (A + A.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(H)
    start = (L - M) // 2
    kept = eigs[start:start + M]
    staircase = np.arange(M) + 0.5
    coeffs = np.polynomial.polynomial.polyfit(kept, staircase, 7)
    unfolded = np.polynomial.polynomial.polyval(kept, coeffs)
    unfolded = np.sort(unfolded)
    # the fit is monotone over the bulk; nudge any numerically flat pair
    d = np.diff(unfolded)
    if np.any(d <= 0):
        unfolded = unfolded + np.arange(M) * 1e-12
    return unfolded


def sample_levels(ens: LevelEnsemble, seed: int) -> LevelSet:
    """Draw one level set; (ensemble, seed) fully determines the output."""
    rng = np.random.default_rng(seed)
    if ens.kind is EnsembleKind.POISSON_SPACINGS:
        levels = np.cumsum(rng.exponential(ens.delta, ens.M))
    elif ens.kind is EnsembleKind.SURMISE_SPACINGS:
        s = _sample_surmise_spacings(rng, ens.beta, ens.M)
        levels = np.cumsum(ens.delta * s)
    else:
        levels = ens.delta * _unfolded_matrix_levels(rng, ens.kind, ens.M)
    return LevelSet(levels=levels,
                    provenance=f"{ens.kind.value}(M={ens.M}, delta={ens.delta},"
                               f" beta={ens.beta}, seed={seed})")


def spacing_pdf(kind: EnsembleKind, s, beta: Optional[int] = None):
    """Nearest-neighbour spacing density in units of the mean spacing."""
    s = np.asarray(s, dtype=float)
    if kind is EnsembleKind.POISSON_SPACINGS:
        out = np.exp(-s)
    else:
        if kind is EnsembleKind.GOE_MATRIX:
            beta = 1
        elif kind is EnsembleKind.GUE_MATRIX:
            beta = 2
        if beta not in _SURMISE:
            raise ValueError("beta must be in {1, 2, 4}")
        c, a = _SURMISE[beta]
        out = c * s**beta * np.exp(-a * s * s)
    out = np.where(s < 0, 0.0, out)
    return out if out.ndim else float(out)


def spacing_cdf(kind: EnsembleKind, s, beta: Optional[int] = None):
    """Cumulative spacing distribution matching spacing_pdf."""
    from scipy.special import erf

    s = np.asarray(s, dtype=float)
    s = np.maximum(s, 0.0)
    if kind is EnsembleKind.POISSON_SPACINGS:
        out = 1.0 - np.exp(-s)
    else:
        if kind is EnsembleKind.GOE_MATRIX:
            beta = 1
        elif kind is EnsembleKind.GUE_MATRIX:
            beta = 2
        if beta == 1:
            out = 1.0 - np.exp(-math.pi * s * s / 4.0)
        elif beta == 2:
            r = 2.0 * s / math.sqrt(math.pi)
            out = erf(r) - (4.0 * s / math.pi) * np.exp(-4.0 * s * s / math.pi)
        elif beta == 4:
            # int_0^s c x^4 exp(-a x^2) dx, integrated by parts twice
            c, a = _SURMISE[4]
            out = c * (3.0 * math.sqrt(math.pi) / (8.0 * a**2.5) * erf(np.sqrt(a) * s)
                       - np.exp(-a * s * s) * (s**3 / (2.0 * a)
                                               + 3.0 * s / (4.0 * a**2)))
        else:
            raise ValueError("beta must be in {1, 2, 4}")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CouplingMatrix:
    """Hermitian traceless coupling in the level eigenbasis."""

    Q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=complex)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("Q must be square")
        if np.abs(q - q.conj().T).max() > 1e-10 * max(1.0, np.abs(q).max()):
            raise ValueError("Q must be Hermitian")
        if abs(np.trace(q)) > 1e-10 * max(1.0, np.abs(q).max()):
            raise ValueError("Q must be traceless")
        object.__setattr__(self, "Q", q)

    @property
    def M(self) -> int:
        return self.Q.shape[0]

    def mean_offdiag_sq(self) -> float:
        M = self.M
        w = np.abs(self.Q) ** 2
        return float((w.sum() - np.trace(w).real) / (M * (M - 1)))


def sample_coupling(M: int, seed: int, scale: float = 1.0) -> CouplingMatrix:
    """Gaussian Hermitian coupling: off-diagonal entries of variance scale,
    real Gaussian diagonal, trace projected out."""
    rng = np.random.default_rng(seed)
    A = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / math.sqrt(2.0)
    Q = (A + A.conj().T) / math.sqrt(2.0)
    np.fill_diagonal(Q, rng.standard_normal(M))
    Q = Q - np.eye(M) * (np.trace(Q) / M)
    return CouplingMatrix(Q=math.sqrt(scale) * Q)


@dataclass
class SpectralEstimate:
    omega_grid: np.ndarray
    r_hat: np.ndarray
    stderr: np.ndarray
    bandwidth: float
    samples: int
    per_realization: np.ndarray = field(repr=False, default=None)


def _realization_spectral(levels: np.ndarray, Q: np.ndarray,
                          omega_grid: np.ndarray, bandwidth: float) -> np.ndarray:
    M = levels.size
    gaps = levels[:, None] - levels[None, :]
    weights = np.abs(Q) ** 2
    off = ~np.eye(M, dtype=bool)
    r = _kernels.gaussian_kernel_sum(gaps[off].ravel(), weights[off].ravel(),
                                     omega_grid, bandwidth)
    return (math.pi / M) * np.asarray(r)


def estimate_spectral_function(realizations: Sequence[tuple[LevelSet, CouplingMatrix]],
                               omega_grid, bandwidth: float,
                               n_boot: int = 200, boot_seed: int = 0,
                               min_realizations: int = MIN_REALIZATIONS,
                               ) -> SpectralEstimate:
    """Ensemble-averaged smoothed spectral function with bootstrap errors."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    n = len(realizations)
    if n < min_realizations:
        raise InsufficientSamples(f"need >= {min_realizations} realizations, got {n}")
    omega_grid = np.asarray(omega_grid, dtype=float)
    per = np.empty((n, omega_grid.size))
    for i, (ls, cm) in enumerate(realizations):
        per[i] = _realization_spectral(ls.levels, cm.Q, omega_grid, bandwidth)
    mean = per.mean(axis=0)
    rng = np.random.default_rng(boot_seed)
    idx = rng.integers(0, n, size=(n_boot, n))
    boot_means = per[idx].mean(axis=1)
    stderr = boot_means.std(axis=0, ddof=1)
    return SpectralEstimate(omega_grid=omega_grid, r_hat=mean, stderr=stderr,
                            bandwidth=bandwidth, samples=n, per_realization=per)


def surmise_prediction(kind: EnsembleKind, qbar2: float, omega,
                       delta: float, beta: Optional[int] = None):
    """R(omega) ~ pi * qbar2 * p(omega/delta) / delta, with p the spacing
    density per unit frequency."""
    omega = np.asarray(omega, dtype=float)
    pdf = np.asarray(spacing_pdf(kind, np.abs(omega) / delta, beta))
    out = math.pi * qbar2 * pdf / delta
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RateEstimate:
    gamma: float
    stderr: float
    window: tuple[float, float]
    clipped: bool  # True when a negative intercept was reported as 0


def rate_estimate(est: SpectralEstimate, degree: int = 2) -> RateEstimate:
    """Dephasing rate gamma = (1/2) * R(0+) by polynomial extrapolation.

    Fits R(omega) on the window [bandwidth, 10*bandwidth] (excluding
    |omega| < bandwidth, where the kernel's own width distorts the shape)
    and returns half the omega -> 0 intercept with its propagated error.
    """
    lo, hi = est.bandwidth, 10.0 * est.bandwidth
    mask = (est.omega_grid >= lo) & (est.omega_grid <= hi)
    npts = int(mask.sum())
    if npts < degree + 2:
        raise InsufficientSamples(
            f"only {npts} grid points in the window [{lo:g}, {hi:g}]")
    x = est.omega_grid[mask]
    y = est.r_hat[mask]
    sig = est.stderr[mask]
    # zero bootstrap error (e.g. an identically-zero coupling) would make the
    # weights blow up; flatten such points to the smallest positive error
    positive = sig[sig > 0.0]
    sig = np.maximum(sig, float(positive.min()) if positive.size else 1.0)
    X = np.vander(x, degree + 1, increasing=True)
    W = 1.0 / sig**2
    XtW = X.T * W
    cov = np.linalg.inv(XtW @ X)
    beta_hat = cov @ (XtW @ y)
    intercept = float(beta_hat[0])
    intercept_err = float(math.sqrt(max(cov[0, 0], 0.0)))
    gamma = 0.5 * intercept
    stderr = 0.5 * intercept_err
    clipped = gamma < 0
    return RateEstimate(gamma=max(gamma, 0.0), stderr=stderr,
                        window=(float(lo), float(hi)), clipped=clipped)
