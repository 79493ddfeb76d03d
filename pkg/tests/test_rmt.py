"""Level ensembles, spacing laws, and the smoothed spectral estimator."""

import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from dephaselab import rmt
from dephaselab.errors import InsufficientSamples
from dephaselab.rmt import (CouplingMatrix, EnsembleKind, LevelEnsemble,
                            LevelSet)


def _draw(kind, M, n, seed, qbar2=1.0, delta=1.0, beta=None):
    ens = LevelEnsemble(kind=kind, M=M, delta=delta, beta=beta)
    out = []
    for ss in np.random.SeedSequence(seed).spawn(n):
        ls_, qs_ = (int(x) for x in ss.generate_state(2))
        out.append((rmt.sample_levels(ens, ls_),
                    rmt.sample_coupling(M, qs_, scale=qbar2)))
    return out


def _ks(spacings, kind, beta=None):
    s = np.sort(spacings)
    cdf = rmt.spacing_cdf(kind, s, beta)
    n = s.size
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(np.max(np.maximum(np.abs(hi - cdf), np.abs(cdf - lo))))


# ------------------------------------------------------------------ ensembles

def test_ensemble_validation():
    with pytest.raises(ValueError):
        LevelEnsemble(kind=EnsembleKind.GOE_MATRIX, M=8)     # matrix needs 16
    with pytest.raises(ValueError):
        LevelEnsemble(kind=EnsembleKind.POISSON_SPACINGS, M=0)
    with pytest.raises(ValueError):
        LevelEnsemble(kind=EnsembleKind.POISSON_SPACINGS, M=10, delta=0.0)
    with pytest.raises(ValueError):
        LevelEnsemble(kind=EnsembleKind.SURMISE_SPACINGS, M=10, beta=3)


def test_level_set_validation_and_spacings():
    with pytest.raises(ValueError):
        LevelSet(levels=np.array([0.0, 1.0, 1.0]), provenance="x")
    ls = LevelSet(levels=np.array([0.0, 1.0, 3.0]), provenance="x")
    assert ls.M == 3
    assert np.allclose(ls.spacings(), [1.0, 2.0])


def test_sampling_is_deterministic():
    ens = LevelEnsemble(kind=EnsembleKind.GOE_MATRIX, M=32)
    a = rmt.sample_levels(ens, 123).levels
    b = rmt.sample_levels(ens, 123).levels
    c = rmt.sample_levels(ens, 124).levels
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert "seed=123" in rmt.sample_levels(ens, 123).provenance


def test_poisson_mean_spacing():
    ens = LevelEnsemble(kind=EnsembleKind.POISSON_SPACINGS, M=20000, delta=0.7)
    ls = rmt.sample_levels(ens, 5)
    assert ls.spacings().mean() == pytest.approx(0.7, rel=0.02)


def test_unfolded_mean_spacing_matches_delta():
    ens = LevelEnsemble(kind=EnsembleKind.GOE_MATRIX, M=400, delta=2.0)
    ls = rmt.sample_levels(ens, 5)
    assert ls.spacings().mean() == pytest.approx(2.0, rel=0.05)


# --------------------------------------------------------------- spacing laws

@pytest.mark.parametrize("kind,beta", [
    (EnsembleKind.POISSON_SPACINGS, None),
    (EnsembleKind.SURMISE_SPACINGS, 1),
    (EnsembleKind.SURMISE_SPACINGS, 2),
    (EnsembleKind.SURMISE_SPACINGS, 4),
])
def test_spacing_pdf_normalization_and_mean(kind, beta):
    mass, _ = scipy_quad(lambda s: rmt.spacing_pdf(kind, s, beta), 0.0, 40.0)
    mean, _ = scipy_quad(lambda s: s * rmt.spacing_pdf(kind, s, beta), 0.0, 40.0)
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("kind,beta", [
    (EnsembleKind.POISSON_SPACINGS, None),
    (EnsembleKind.GOE_MATRIX, None),
    (EnsembleKind.GUE_MATRIX, None),
    (EnsembleKind.SURMISE_SPACINGS, 4),
])
def test_spacing_cdf_matches_integrated_pdf(kind, beta):
    for s in (0.2, 0.7, 1.3, 2.5):
        val, _ = scipy_quad(lambda x: rmt.spacing_pdf(kind, x, beta), 0.0, s)
        assert rmt.spacing_cdf(kind, s, beta) == pytest.approx(val, abs=1e-10)


def test_spacing_pdf_level_repulsion():
    assert rmt.spacing_pdf(EnsembleKind.GOE_MATRIX, 0.0) == 0.0
    assert rmt.spacing_pdf(EnsembleKind.POISSON_SPACINGS, 0.0) == 1.0
    assert rmt.spacing_pdf(EnsembleKind.GOE_MATRIX, -1.0) == 0.0


def test_surmise_sampler_matches_own_cdf():
    for beta in (1, 2, 4):
        ens = LevelEnsemble(kind=EnsembleKind.SURMISE_SPACINGS, M=20000,
                            beta=beta)
        s = rmt.sample_levels(ens, 11).spacings()
        # levels = cumsum of draws, so prepend the first level itself
        first = rmt.sample_levels(ens, 11).levels[0]
        s = np.concatenate([[first], s])
        assert _ks(s, EnsembleKind.SURMISE_SPACINGS, beta) < 0.015


def test_goe_unfolded_spacings_follow_surmise():
    ens = LevelEnsemble(kind=EnsembleKind.GOE_MATRIX, M=200)
    pooled = [rmt.sample_levels(ens, 1000 + r).spacings() for r in range(10)]
    ks = _ks(np.concatenate(pooled), EnsembleKind.SURMISE_SPACINGS, 1)
    assert ks < 0.05


# ------------------------------------------------------------------- coupling

def test_coupling_validation():
    with pytest.raises(ValueError):
        CouplingMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        CouplingMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))   # not Hermitian
    with pytest.raises(ValueError):
        CouplingMatrix(np.eye(2))                            # not traceless


def test_sampled_coupling_contracts():
    cm = rmt.sample_coupling(200, seed=3, scale=0.5)
    assert np.abs(cm.Q - cm.Q.conj().T).max() < 1e-12
    assert abs(np.trace(cm.Q)) < 1e-10
    assert cm.M == 200
    assert cm.mean_offdiag_sq() == pytest.approx(0.5, rel=0.03)


# ------------------------------------------------------------------ estimator

def test_estimator_requires_enough_samples():
    reals = _draw(EnsembleKind.POISSON_SPACINGS, 50, 5, seed=0)
    with pytest.raises(InsufficientSamples):
        rmt.estimate_spectral_function(reals, np.linspace(0, 1, 5), 0.05)
    with pytest.raises(ValueError):
        rmt.estimate_spectral_function(reals, np.linspace(0, 1, 5), -1.0,
                                       min_realizations=2)


def test_estimator_is_nonnegative_and_symmetric():
    reals = _draw(EnsembleKind.POISSON_SPACINGS, 80, 25, seed=1)
    grid = np.linspace(-1.0, 1.0, 21)
    est = rmt.estimate_spectral_function(reals, grid, 0.1)
    assert np.all(est.r_hat >= 0.0)
    assert np.allclose(est.r_hat, est.r_hat[::-1], rtol=1e-10)
    assert np.all(est.stderr >= 0.0)
    assert est.samples == 25


def test_zero_coupling_gives_zero_spectrum_and_rate():
    ens = LevelEnsemble(kind=EnsembleKind.POISSON_SPACINGS, M=60)
    reals = [(rmt.sample_levels(ens, r), CouplingMatrix(np.zeros((60, 60))))
             for r in range(20)]
    grid = np.linspace(0.0, 1.0, 41)
    est = rmt.estimate_spectral_function(reals, grid, 0.05)
    assert np.abs(est.r_hat).max() == 0.0
    res = rmt.rate_estimate(est)
    assert res.gamma == 0.0


def test_rate_estimate_needs_window_points():
    reals = _draw(EnsembleKind.POISSON_SPACINGS, 60, 20, seed=2)
    est = rmt.estimate_spectral_function(reals, np.linspace(0.0, 5.0, 6), 0.05)
    with pytest.raises(InsufficientSamples):
        rmt.rate_estimate(est)


def test_estimator_matches_surmise_prediction_at_small_frequency():
    # Pairs (levels, Q) drawn independently: the estimator should follow
    # pi * qbar2 * p(omega/Delta) / Delta while only nearest-neighbour gaps
    # contribute.  Beyond ~0.5 Delta next-nearest gaps enter and the
    # nearest-spacing prediction stops being the right reference.
    reals = _draw(EnsembleKind.SURMISE_SPACINGS, 300, 60, seed=77, beta=1)
    grid = np.linspace(0.1, 0.5, 9)
    est = rmt.estimate_spectral_function(reals, grid, bandwidth=0.04)
    pred = rmt.surmise_prediction(EnsembleKind.SURMISE_SPACINGS, 1.0, grid,
                                  1.0, beta=1)
    assert np.max(np.abs(est.r_hat - pred) / pred) < 0.10


def test_surmise_prediction_shapes():
    assert rmt.surmise_prediction(EnsembleKind.GOE_MATRIX, 1.0, 0.0, 1.0) == 0.0
    assert rmt.surmise_prediction(EnsembleKind.POISSON_SPACINGS, 2.0, 0.0,
                                  1.0) == pytest.approx(2.0 * math.pi)
    # doubling Delta halves the zero-frequency Poisson prediction
    a = rmt.surmise_prediction(EnsembleKind.POISSON_SPACINGS, 1.0, 0.0, 1.0)
    b = rmt.surmise_prediction(EnsembleKind.POISSON_SPACINGS, 1.0, 0.0, 2.0)
    assert a == pytest.approx(2.0 * b)
    arr = rmt.surmise_prediction(EnsembleKind.GOE_MATRIX, 1.0,
                                 np.array([-0.3, 0.3]), 1.0)
    assert arr[0] == pytest.approx(arr[1])    # even in omega


def test_poisson_rate_extrapolation_small():
    # gamma = R(0+)/2 -> (pi/2) qbar2 / Delta for a Poisson bath
    reals = _draw(EnsembleKind.POISSON_SPACINGS, 150, 80, seed=9)
    grid = np.linspace(0.0, 1.0, 81)
    est = rmt.estimate_spectral_function(reals, grid, 0.04)
    res = rmt.rate_estimate(est)
    assert res.gamma == pytest.approx(math.pi / 2.0, rel=0.15)
    assert not res.clipped
    assert res.window == (0.04, 0.4)
