"""CLI: output formats, exit codes, and byte-level determinism."""

import json
import math
import os

import pytest
from click.testing import CliRunner

from dephaselab import cli


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, args, cwd):
    old = os.getcwd()
    os.chdir(cwd)
    try:
        return runner.invoke(cli.main, args, catch_exceptions=False)
    finally:
        os.chdir(old)


def _read(path):
    return path.read_bytes()


SPINBOSON = ["spinboson", "--kappa", "0.5", "--lambda", "0.4",
             "--t-max", "20", "--t-points", "8", "-o", "sb"]


def test_spinboson_outputs(runner, tmp_path):
    res = _run(runner, SPINBOSON, tmp_path)
    assert res.exit_code == 0
    lines = (tmp_path / "sb.csv").read_text().split("\n")
    assert lines[0] == "t,gamma_t,coherence,method"
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == 0.0
    assert float(first[2]) == 1.0
    meta = json.loads((tmp_path / "sb.json").read_text())
    assert meta["regime"] == "regular"
    assert meta["norm_sq"] == pytest.approx(0.4 / 0.5)
    assert meta["asymptotic_rate"]["analytic"] == 0.0
    assert meta["tolerance_not_met"] is False


def test_spinboson_divergent_summary(runner, tmp_path):
    res = _run(runner, ["spinboson", "--kappa", "0", "--lambda", "1",
                        "--t-max", "10", "--t-points", "5", "-o", "ohm"],
               tmp_path)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "ohm.json").read_text())
    assert meta["regime"] == "infrared_singular"
    assert meta["norm_sq"] == "divergent"
    assert meta["cloud_energy"] == pytest.approx(1.0)
    assert meta["ground_state_overlap"] == 0.0


def test_spinboson_rejects_nonintegrable(runner, tmp_path):
    res = _run(runner, ["spinboson", "--kappa", "-2", "--lambda", "1"],
               tmp_path)
    assert res.exit_code == 2


def test_spinboson_rejects_bad_grid(runner, tmp_path):
    res = _run(runner, ["spinboson", "--kappa", "1", "--lambda", "1",
                        "--t-min", "5", "--t-max", "1"], tmp_path)
    assert res.exit_code == 2


def test_oracle_check_passes(runner, tmp_path):
    res = _run(runner, ["oracle-check", "--kappa", "1", "--lambda", "0.1",
                        "-K", "2", "--t-points", "8", "-o", "orc"], tmp_path)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "orc.json").read_text())
    assert meta["passes"] is True
    assert meta["max_coherence_rel_err"] <= 1e-5
    assert meta["max_leakage"] < 1e-6
    assert meta["max_diagonal_drift"] <= 1e-10


def test_oracle_check_truncation_exit(runner, tmp_path):
    res = _run(runner, ["oracle-check", "--kappa", "1", "--lambda", "2.0",
                        "-K", "1", "--n-max", "2", "--t-points", "6",
                        "-o", "leak"], tmp_path)
    assert res.exit_code == 4


def test_oracle_check_dimension_exit(runner, tmp_path):
    res = _run(runner, ["oracle-check", "--kappa", "1", "--lambda", "0.1",
                        "-K", "6", "--n-max", "9", "-o", "cap"], tmp_path)
    assert res.exit_code == 6


def test_oracle_check_rejects_unphysical(runner, tmp_path):
    res = _run(runner, ["oracle-check", "--kappa", "-1", "--lambda", "0.1"],
               tmp_path)
    assert res.exit_code == 2


def test_rmt_spacings(runner, tmp_path):
    res = _run(runner, ["rmt", "spacings", "--ensemble", "poisson",
                        "-M", "5000", "--seed", "1", "-o", "sp"], tmp_path)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "sp.json").read_text())
    assert meta["n_spacings"] == 4999
    assert meta["mean_spacing"] == pytest.approx(1.0, rel=0.05)
    assert meta["ks_statistic"] < 0.05
    header = (tmp_path / "sp.csv").read_text().split("\n")[0]
    assert header == "s,empirical_pdf,theory_pdf"


def test_rmt_spectral_and_rate(runner, tmp_path):
    common = ["--ensemble", "poisson", "-M", "60", "--realizations", "20",
              "--seed", "7", "--omega-points", "41"]
    res = _run(runner, ["rmt", "spectral", *common, "-o", "spec"], tmp_path)
    assert res.exit_code == 0
    header = (tmp_path / "spec.csv").read_text().split("\n")[0]
    assert header == "omega,r_hat,stderr,surmise"
    res = _run(runner, ["rmt", "rate", *common, "-o", "rate"], tmp_path)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "rate.json").read_text())
    assert meta["gamma"] >= 0.0 and meta["stderr"] >= 0.0
    assert meta["window"] == [0.05, 0.5]


def test_rmt_insufficient_samples_exit(runner, tmp_path):
    res = _run(runner, ["rmt", "spectral", "--ensemble", "poisson",
                        "-M", "60", "--realizations", "3", "--seed", "7",
                        "-o", "few"], tmp_path)
    assert res.exit_code == 5


def test_meanfield_zero_coupling(runner, tmp_path):
    res = _run(runner, ["meanfield", "-N", "3", "-M", "16", "--qbar2", "0",
                        "--realizations", "2", "--seed", "3",
                        "--t-points", "6", "-o", "mf0"], tmp_path)
    assert res.exit_code == 0
    rows = (tmp_path / "mf0.csv").read_text().strip().split("\n")[1:]
    for row in rows:
        cells = [float(c) for c in row.split(",")]
        assert cells[1] == pytest.approx(1.0, abs=1e-12)   # poisson |Gamma|
        assert cells[3] == pytest.approx(1.0, abs=1e-12)   # goe |Gamma|


def test_meanfield_sidecar(runner, tmp_path):
    res = _run(runner, ["meanfield", "-N", "4", "-M", "16",
                        "--realizations", "3", "--seed", "5",
                        "--t-points", "10", "-o", "mf"], tmp_path)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "mf.json").read_text())
    assert set(meta["longtime"]) == {"poisson", "goe"}
    assert math.isfinite(meta["separation_sigmas"])
    assert "verdict" in meta


def test_meanfield_rejects_surmise_bath(runner, tmp_path):
    res = _run(runner, ["meanfield", "--ensembles", "poisson,surmise-b1",
                        "--seed", "1"], tmp_path)
    assert res.exit_code == 2
    res = _run(runner, ["meanfield", "--ensembles", "nope", "--seed", "1"],
               tmp_path)
    assert res.exit_code == 2


def test_seed_is_required(runner, tmp_path):
    res = _run(runner, ["rmt", "spacings", "--ensemble", "poisson"], tmp_path)
    assert res.exit_code == 2


def test_repeat_runs_are_byte_identical(runner, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    for cwd in (a, b):
        _run(runner, SPINBOSON, cwd)
        _run(runner, ["rmt", "spacings", "--ensemble", "goe", "-M", "32",
                      "--seed", "2", "-o", "sp"], cwd)
    for name in ("sb.csv", "sb.json", "sp.csv", "sp.json"):
        assert _read(a / name) == _read(b / name)


def test_threads_do_not_change_bytes(runner, tmp_path):
    outs = {}
    for label, threads in (("t1", "1"), ("t8", "8")):
        d = tmp_path / label
        d.mkdir()
        _run(runner, ["rmt", "spectral", "--ensemble", "goe", "-M", "32",
                      "--realizations", "20", "--seed", "4",
                      "--omega-points", "21", "--threads", threads,
                      "-o", "spec"], d)
        _run(runner, ["meanfield", "-N", "3", "-M", "16",
                      "--realizations", "3", "--seed", "4", "--t-points", "8",
                      "--threads", threads, "-o", "mf"], d)
        outs[label] = d
    for name in ("spec.csv", "spec.json", "mf.csv", "mf.json"):
        assert _read(outs["t1"] / name) == _read(outs["t8"] / name)


def test_threads_env_fallback(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("DEPHASELAB_THREADS", "2")
    res = _run(runner, ["meanfield", "-N", "2", "-M", "16",
                        "--realizations", "2", "--seed", "9",
                        "--t-points", "5", "-o", "env"], tmp_path)
    assert res.exit_code == 0
