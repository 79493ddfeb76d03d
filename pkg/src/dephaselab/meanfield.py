"""Direct finite-size simulation of a spin dephasing against N copies of an
M-level system with 1/sqrt(N) collective coupling.

With tunneling switched off the Hamiltonian is block diagonal in the spin
basis, so the off-diagonal qubit element factorizes over subsystems:

    Gamma_N(t) = prod_k Tr[(I/M) * exp(i h_minus^(k) t) * exp(-i h_plus^(k) t)]

with h_pm = h +- Q/sqrt(N).  Each factor needs two M x M eigendecompositions
and a weighted phase sum; the full 2 M^N-dimensional propagation is kept
around (dephasing_factor_dense) purely to validate the product formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels, rmt
from .errors import DimensionCap

__all__ = [
    "MeanFieldBath",
    "MeanFieldConfig",
    "EnsembleCurve",
    "ComparisonResult",
    "draw_bath",
    "dephasing_factor",
    "dephasing_factor_dense",
    "second_order_exponent",
    "compare_ensembles",
]

MAX_M = 512
MAX_N = 64


@dataclass(frozen=True)
class MeanFieldBath:
    """N subsystems, each an (ascending level array, Hermitian traceless Q)."""

    subsystems: tuple
    identical_copies: bool = False

    def __post_init__(self):
        if not self.subsystems:
            raise ValueError("need at least one subsystem")
        M = self.subsystems[0][0].size
        for lv, Q in self.subsystems:
            if lv.size != M or Q.shape != (M, M):
                raise ValueError("all subsystems must share the level count M")
        if M > MAX_M or len(self.subsystems) > MAX_N:
            raise DimensionCap(f"M <= {MAX_M} and N <= {MAX_N} enforced")

    @property
    def N(self) -> int:
        return len(self.subsystems)

    @property
    def M(self) -> int:
        return self.subsystems[0][0].size


def draw_bath(kind: rmt.EnsembleKind, N: int, M: int, delta: float,
              qbar2: float, seed: int, identical_copies: bool = False,
              beta: int | None = None) -> MeanFieldBath:
    """Sample a bath with the given spectral statistics and coupling power."""
    ens = rmt.LevelEnsemble(kind=kind, M=M, delta=delta, beta=beta)
    n_draws = 1 if identical_copies else N
    children = np.random.SeedSequence(seed).spawn(n_draws)
    subs = []
    for ss in children:
        lseed, qseed = ss.generate_state(2)
        levels = rmt.sample_levels(ens, int(lseed)).levels
        Q = rmt.sample_coupling(M, int(qseed), scale=qbar2).Q
        subs.append((levels, Q))
    if identical_copies:
        subs = subs * N
    return MeanFieldBath(subsystems=tuple(subs), identical_copies=identical_copies)


def _factor(levels: np.ndarray, Q: np.ndarray, inv_sqrt_n: float,
            t_grid: np.ndarray) -> np.ndarray:
    """Tr[exp(i h_m t) exp(-i h_p t)] / M on the time grid."""
    M = levels.size
    h = np.diag(levels).astype(complex)
    V = inv_sqrt_n * Q
    lam_p, U_p = np.linalg.eigh(h + V)
    lam_m, U_m = np.linalg.eigh(h - V)
    O = U_m.conj().T @ U_p
    w = (np.abs(O) ** 2 / M).ravel()
    phases = (lam_m[:, None] - lam_p[None, :]).ravel()
    return np.asarray(_kernels.weighted_phase_sum(phases, w, t_grid))


def dephasing_factor(bath: MeanFieldBath, t_grid) -> np.ndarray:
    """Gamma_N(t): complex dephasing factor of the qubit off-diagonal."""
    t_grid = np.asarray(t_grid, dtype=float)
    inv_sqrt_n = 1.0 / math.sqrt(bath.N)
    out = np.ones(t_grid.size, dtype=complex)
    for levels, Q in bath.subsystems:  # ascending k: deterministic product order
        out *= _factor(levels, Q, inv_sqrt_n, t_grid)
    return out


def dephasing_factor_dense(bath: MeanFieldBath, t_grid) -> np.ndarray:
    """Brute-force Gamma_N(t) on the full M^N-dimensional bath space."""
    t_grid = np.asarray(t_grid, dtype=float)
    dim = bath.M ** bath.N
    if dim > 4096:
        raise DimensionCap(f"dense check limited to M^N <= 4096, got {dim}")
    inv_sqrt_n = 1.0 / math.sqrt(bath.N)
    Hp = np.zeros((dim, dim), dtype=complex)
    Hm = np.zeros((dim, dim), dtype=complex)
    for k, (levels, Q) in enumerate(bath.subsystems):
        h = np.diag(levels).astype(complex)
        left = np.eye(bath.M**k)
        right = np.eye(bath.M ** (bath.N - 1 - k))
        for target, sign in ((Hp, +1.0), (Hm, -1.0)):
            target += np.kron(np.kron(left, h + sign * inv_sqrt_n * Q), right)
    lam_p, U_p = np.linalg.eigh(Hp)
    lam_m, U_m = np.linalg.eigh(Hm)
    O = U_m.conj().T @ U_p
    w = (np.abs(O) ** 2 / dim).ravel()
    phases = (lam_m[:, None] - lam_p[None, :]).ravel()
    return np.asarray(_kernels.weighted_phase_sum(phases, w, t_grid))


def second_order_exponent(bath: MeanFieldBath, t_grid) -> np.ndarray:
    """Weak-coupling cumulant prediction for -ln|Gamma_N(t)|:

    sum_k (4/(N M)) sum_{m,m'} |Q_mm'|^2 (1 - cos(w_mm' t)) / w_mm'^2
    with the w -> 0 limit t^2/2 on degenerate pairs.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.zeros(t_grid.size)
    for levels, Q in bath.subsystems:
        M = levels.size
        w = levels[:, None] - levels[None, :]
        q2 = np.abs(Q) ** 2
        for i, t in enumerate(t_grid):
            with np.errstate(divide="ignore", invalid="ignore"):
                ker = (1.0 - np.cos(w * t)) / w**2
            ker[w == 0] = 0.5 * t * t
            out[i] += (4.0 / (bath.N * M)) * float((q2 * ker).sum())
    return out


@dataclass(frozen=True)
class MeanFieldConfig:
    N: int
    M: int
    delta: float
    qbar2: float
    realizations: int
    seed: int
    t_grid: np.ndarray
    ensembles: tuple = (rmt.EnsembleKind.POISSON_SPACINGS, rmt.EnsembleKind.GOE_MATRIX)


@dataclass
class EnsembleCurve:
    kind: rmt.EnsembleKind
    abs_gamma_mean: np.ndarray
    abs_gamma_stderr: np.ndarray
    longtime_per_realization: np.ndarray

    @property
    def longtime_mean(self) -> float:
        return float(self.longtime_per_realization.mean())

    @property
    def longtime_stderr(self) -> float:
        n = self.longtime_per_realization.size
        return float(self.longtime_per_realization.std(ddof=1) / math.sqrt(n))

    # |Gamma| scatters lognormally over realizations, so ensemble contrasts
    # are judged on log |Gamma| (geometric mean) rather than the arithmetic
    # mean, which a single lucky realization can dominate.
    @property
    def longtime_log_mean(self) -> float:
        return float(np.log(self.longtime_per_realization).mean())

    @property
    def longtime_log_stderr(self) -> float:
        n = self.longtime_per_realization.size
        return float(np.log(self.longtime_per_realization).std(ddof=1)
                     / math.sqrt(n))


@dataclass
class ComparisonResult:
    t_grid: np.ndarray
    curves: dict
    window: tuple[float, float]

    def separation_sigmas(self, kind_a: rmt.EnsembleKind,
                          kind_b: rmt.EnsembleKind) -> float:
        """Geometric-mean contrast (log_a - log_b) in combined standard errors."""
        a, b = self.curves[kind_a], self.curves[kind_b]
        se = math.hypot(a.longtime_log_stderr, b.longtime_log_stderr)
        return ((a.longtime_log_mean - b.longtime_log_mean) / se
                if se > 0 else math.inf)


def compare_ensembles(config: MeanFieldConfig, threads: int = 1) -> ComparisonResult:
    """Paired decay curves for regular (Poisson) vs chaotic (GOE) baths.

    The long-time statistic is |Gamma| averaged over the final decade of the
    time grid (finite-M recurrences make a pointwise limit meaningless);
    error bars are over bath realizations.
    """
    t_grid = np.asarray(config.t_grid, dtype=float)
    window_lo = t_grid[-1] / 10.0
    win = t_grid >= window_lo
    if config.realizations < 2:
        raise ValueError("need at least 2 realizations for error bars")

    curves = {}
    for ki, kind in enumerate(config.ensembles):
        children = np.random.SeedSequence((config.seed, ki)).spawn(config.realizations)

        def run_one(r):
            bath = draw_bath(kind, config.N, config.M, config.delta,
                             config.qbar2, seed=int(children[r].generate_state(1)[0]))
            return np.abs(dephasing_factor(bath, t_grid))

        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as ex:
                rows = list(ex.map(run_one, range(config.realizations)))
        else:
            rows = [run_one(r) for r in range(config.realizations)]
        absg = np.array(rows)
        curves[kind] = EnsembleCurve(
            kind=kind,
            abs_gamma_mean=absg.mean(axis=0),
            abs_gamma_stderr=(absg.std(axis=0, ddof=1)
                              / math.sqrt(config.realizations)),
            longtime_per_realization=absg[:, win].mean(axis=1),
        )
    return ComparisonResult(t_grid=t_grid, curves=curves,
                            window=(float(window_lo), float(t_grid[-1])))
