"""Parity between the compiled kernel backend and the NumPy reference."""

import math

import numpy as np
import pytest

from dephaselab import _kernels
from dephaselab._kernels import _numpy as ref

try:
    from dephaselab._kernels import _core as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None,
                                    reason="compiled extension not built")


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    return {
        "gsq": rng.uniform(0.0, 1.0, 64),
        "omegas": np.sort(rng.uniform(0.1, 5.0, 64)),
        "t": np.linspace(0.0, 30.0, 40),
        "points": rng.normal(0.0, 2.0, 500),
        "weights": rng.uniform(0.0, 1.0, 500),
        "grid": np.linspace(-3.0, 3.0, 61),
        "phases": rng.normal(0.0, 1.0, 300),
        "pw": rng.uniform(0.0, 1.0, 300),
    }


def test_backend_is_reported():
    assert _kernels.BACKEND in ("cython", "numpy")


def test_reference_discrete_gamma_formula(data):
    out = ref.discrete_gamma(data["gsq"], data["omegas"], data["t"])
    t0 = data["t"][7]
    direct = 4.0 * float(np.sum(data["gsq"]
                                * (1.0 - np.cos(data["omegas"] * t0))))
    assert out[7] == pytest.approx(direct, rel=1e-13)
    assert out[0] == 0.0


def test_reference_kernel_sum_formula(data):
    bw = 0.25
    out = ref.gaussian_kernel_sum(data["points"], data["weights"],
                                  data["grid"], bw)
    x = data["grid"][30]
    norm = 1.0 / (bw * math.sqrt(2.0 * math.pi))
    direct = float(np.sum(data["weights"] * norm
                          * np.exp(-0.5 * ((data["points"] - x) / bw) ** 2)))
    assert out[30] == pytest.approx(direct, rel=1e-12)


def test_reference_phase_sum_formula(data):
    out = ref.weighted_phase_sum(data["phases"], data["pw"], data["t"])
    t0 = data["t"][3]
    direct = complex(np.sum(data["pw"] * np.exp(1j * data["phases"] * t0)))
    assert out[3] == pytest.approx(direct, rel=1e-12)


@needs_compiled
def test_discrete_gamma_parity(data):
    a = compiled.discrete_gamma(data["gsq"], data["omegas"], data["t"])
    b = ref.discrete_gamma(data["gsq"], data["omegas"], data["t"])
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_compiled
def test_gaussian_kernel_sum_parity(data):
    a = compiled.gaussian_kernel_sum(data["points"], data["weights"],
                                     data["grid"], 0.3)
    b = ref.gaussian_kernel_sum(data["points"], data["weights"],
                                data["grid"], 0.3)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13)


@needs_compiled
def test_weighted_phase_sum_parity(data):
    a = compiled.weighted_phase_sum(data["phases"], data["pw"], data["t"])
    b = ref.weighted_phase_sum(data["phases"], data["pw"], data["t"])
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13)


@needs_compiled
def test_parity_on_empty_inputs():
    empty = np.array([])
    t = np.array([0.0, 1.0])
    assert np.allclose(compiled.discrete_gamma(empty, empty, t),
                       ref.discrete_gamma(empty, empty, t))
    assert np.allclose(compiled.weighted_phase_sum(empty, empty, t),
                       ref.weighted_phase_sum(empty, empty, t))
