"""Reproducible command-line front end.

Every command writes a CSV series plus a JSON sidecar next to it
(``<output>.csv`` / ``<output>.json``), with 17-significant-digit decimal
formatting and LF line endings so identical configurations produce
byte-identical files.  Every stochastic command requires an explicit
``--seed``; realizations get counter-derived sub-seeds, so ``--threads``
changes wall time but never the numbers.

Exit codes: 0 ok, 1 oracle gate failed, 2 bad flags, 3 tolerance not met,
4 truncation leak, 5 insufficient samples, 6 dimension cap.
"""

from __future__ import annotations

import json
import math
import os
import sys

import click
import numpy as np

from . import __version__, fock, meanfield, quad, rmt, specfun
from .errors import (DimensionCap, InsufficientSamples, NonIntegrable,
                     NotConverging, ToleranceNotMet, TruncationLeak,
                     UnsupportedRegime)

EXIT_ORACLE_MISMATCH = 1
EXIT_TOLERANCE = 3
EXIT_TRUNCATION = 4
EXIT_SAMPLES = 5
EXIT_DIMENSION = 6


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{float(x):.17g}"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else _fmt(c)
                              for c in row) + "\n")


def _write_json(path: str, obj) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2))
        fh.write("\n")


def _ext_real(x: specfun.ExtReal):
    return "divergent" if x.is_divergent else x.value


def _time_grid(t_min: float, t_max: float, t_points: int, scale: str) -> np.ndarray:
    if t_points < 2 or t_max <= t_min or t_min < 0:
        raise click.UsageError("need t_min >= 0 < t_max and t_points >= 2")
    if scale == "lin":
        return np.linspace(t_min, t_max, t_points)
    if t_min == 0:
        # log grid with an exact t=0 head point
        return np.concatenate([[0.0], np.geomspace(t_max / 1000.0, t_max,
                                                   t_points - 1)])
    return np.geomspace(t_min, t_max, t_points)


def _threads_option(fn):
    return click.option(
        "--threads", type=int,
        default=lambda: int(os.environ.get("DEPHASELAB_THREADS", "1")),
        help="worker threads (results are thread-count independent)")(fn)


_ENSEMBLES = {
    "poisson": (rmt.EnsembleKind.POISSON_SPACINGS, None),
    "goe": (rmt.EnsembleKind.GOE_MATRIX, None),
    "gue": (rmt.EnsembleKind.GUE_MATRIX, None),
    "surmise-b1": (rmt.EnsembleKind.SURMISE_SPACINGS, 1),
    "surmise-b2": (rmt.EnsembleKind.SURMISE_SPACINGS, 2),
    "surmise-b4": (rmt.EnsembleKind.SURMISE_SPACINGS, 4),
}

# spacing-theory reference for each sampler
_THEORY = {
    "poisson": (rmt.EnsembleKind.POISSON_SPACINGS, None),
    "goe": (rmt.EnsembleKind.SURMISE_SPACINGS, 1),
    "gue": (rmt.EnsembleKind.SURMISE_SPACINGS, 2),
    "surmise-b1": (rmt.EnsembleKind.SURMISE_SPACINGS, 1),
    "surmise-b2": (rmt.EnsembleKind.SURMISE_SPACINGS, 2),
    "surmise-b4": (rmt.EnsembleKind.SURMISE_SPACINGS, 4),
}


@click.group()
@click.version_option(__version__)
def main():
    """Numerical laboratory for exactly solvable pure-dephasing models."""


# ----------------------------------------------------------------- spinboson

@main.command()
@click.option("--kappa", type=float, required=True)
@click.option("--lambda", "lambda_", type=float, required=True)
@click.option("--omega-c", type=float, default=1.0, show_default=True)
@click.option("--cutoff", type=click.Choice(["hard", "exp"]), default="hard",
              show_default=True)
@click.option("--temperature", type=float, default=0.0, show_default=True)
@click.option("--t-min", type=float, default=0.0, show_default=True)
@click.option("--t-max", type=float, default=100.0, show_default=True)
@click.option("--t-points", type=int, default=50, show_default=True)
@click.option("--t-scale", type=click.Choice(["log", "lin"]), default="log",
              show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--output", "-o", default="spinboson", show_default=True,
              help="output base path (writes <output>.csv and <output>.json)")
def spinboson(kappa, lambda_, omega_c, cutoff, temperature, t_min, t_max,
              t_points, t_scale, tol, output):
    """Analytic dephasing curve and summary of the spin-boson model."""
    ff = specfun.FormFactor(kappa=kappa, lambda_=lambda_, omega_c=omega_c,
                            cutoff_shape=specfun.CutoffShape(cutoff))
    times = _time_grid(t_min, t_max, t_points, t_scale)

    rows = []
    tolerance_not_met = False
    for t in times:
        try:
            g = specfun.decoherence_exponent(ff, float(t), tol)
        except ToleranceNotMet as exc:
            g = exc.best
            tolerance_not_met = True
        except NonIntegrable as exc:
            raise click.UsageError(str(exc))
        rows.append((t, g, math.exp(-g), "quadrature"))
    _write_csv(output + ".csv", ["t", "gamma_t", "coherence", "method"], rows)

    extrapolated = None
    extrap_unc = None
    try:
        grid = np.geomspace(1.0 / omega_c, 1e3 / omega_c, 25)
        est, unc = quad.limit_at_infinity(
            lambda t: specfun.decoherence_exponent(ff, t, tol) / t, grid)
        extrapolated, extrap_unc = est, unc
    except (NotConverging, ToleranceNotMet):
        pass

    sf = specfun.SpectralFunction(form_factor=ff, temperature=temperature)
    sidecar = {
        "version": __version__,
        "config": {
            "kappa": kappa, "lambda": lambda_, "omega_c": omega_c,
            "cutoff": cutoff, "temperature": temperature,
            "t_min": t_min, "t_max": t_max, "t_points": t_points,
            "t_scale": t_scale, "tol": tol,
        },
        "regime": specfun.classify(ff).value,
        "norm_sq": _ext_real(specfun.norm_sq(ff)),
        "cloud_energy": _ext_real(specfun.cloud_energy(ff)),
        "asymptotic_rate": {
            "analytic": _ext_real(specfun.asymptotic_rate(ff)),
            "extrapolated": extrapolated,
            "extrapolation_uncertainty": extrap_unc,
        },
        "spectral_rate_half_R0": _ext_real(specfun.rate_from_spectral(sf)),
        "ground_state_overlap": specfun.ground_state_overlap(ff),
        "initial_state_overlap": specfun.initial_state_overlap(ff),
        "tolerance_not_met": tolerance_not_met,
    }
    _write_json(output + ".json", sidecar)
    if tolerance_not_met:
        click.echo("warning: quadrature tolerance not met on some grid points",
                   err=True)
        sys.exit(EXIT_TOLERANCE)


# -------------------------------------------------------------- oracle-check

@main.command("oracle-check")
@click.option("--modes", "-K", type=int, default=2, show_default=True)
@click.option("--n-max", type=int, default=None,
              help="occupation cutoff (default: 25 * max coupling weight)")
@click.option("--kappa", type=float, required=True)
@click.option("--lambda", "lambda_", type=float, required=True)
@click.option("--omega-c", type=float, default=1.0, show_default=True)
@click.option("--scheme", type=click.Choice(["midpoint", "gauss"]),
              default="midpoint", show_default=True)
@click.option("--alpha-plus", type=float, default=1.0 / math.sqrt(2.0))
@click.option("--alpha-minus", type=float, default=1.0 / math.sqrt(2.0))
@click.option("--t-min", type=float, default=0.0, show_default=True)
@click.option("--t-max", type=float, default=20.0, show_default=True)
@click.option("--t-points", type=int, default=50, show_default=True)
@click.option("--output", "-o", default="oracle", show_default=True)
def oracle_check(modes, n_max, kappa, lambda_, omega_c, scheme, alpha_plus,
                 alpha_minus, t_min, t_max, t_points, output):
    """Brute-force Fock propagation vs the closed forms; exit 0 iff the
    oracle and the discrete closed form agree to 1e-5 in coherence."""
    ff = specfun.FormFactor(kappa=kappa, lambda_=lambda_, omega_c=omega_c)
    try:
        bath = fock.discretize(ff, modes, fock.DiscretizationScheme(scheme))
    except UnsupportedRegime as exc:
        raise click.UsageError(str(exc))
    if n_max is None:
        n_max = fock.suggest_n_max(bath)
    times = np.linspace(t_min, t_max, t_points)
    try:
        space = fock.TruncatedFockSpace(bath=bath, n_max=n_max)
        run = fock.propagate_and_reduce(space, alpha_plus, alpha_minus, times)
    except TruncationLeak as exc:
        click.echo(f"error: {exc} (raise --n-max)", err=True)
        sys.exit(EXIT_TRUNCATION)
    except DimensionCap as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DIMENSION)

    gamma_cont = np.array([specfun.decoherence_exponent(ff, float(t))
                           for t in times])
    has_offdiag = abs(alpha_plus * alpha_minus) > 0
    if has_offdiag:
        rel = np.abs(np.exp(-run.gamma_oracle) - np.exp(-run.gamma_discrete)) \
            / np.exp(-run.gamma_discrete)
    else:
        rel = np.zeros_like(times)

    rows = []
    for i, t in enumerate(times):
        rows.append((t, run.gamma_oracle[i], run.gamma_discrete[i],
                     gamma_cont[i], rel[i], run.energy[i]))
    _write_csv(output + ".csv",
               ["t", "gamma_oracle", "gamma_discrete", "gamma_continuum",
                "coherence_rel_err", "energy"], rows)

    max_rel = float(np.max(rel)) if has_offdiag else 0.0
    diag_dev = max(abs(s.rho[0, 0].real - abs(alpha_plus) ** 2)
                   for s in run.states)
    sidecar = {
        "version": __version__,
        "config": {"modes": modes, "n_max": n_max, "kappa": kappa,
                   "lambda": lambda_, "omega_c": omega_c, "scheme": scheme,
                   "alpha_plus": alpha_plus, "alpha_minus": alpha_minus},
        "max_coherence_rel_err": max_rel,
        "max_diagonal_drift": diag_dev,
        "max_leakage": run.max_leakage,
        "energy_drift": float(np.max(np.abs(run.energy))),
        "max_continuum_gap": float(np.nanmax(np.abs(
            run.gamma_discrete - gamma_cont))),
        "passes": bool(max_rel <= 1e-5),
    }
    _write_json(output + ".json", sidecar)
    if max_rel > 1e-5:
        click.echo(f"oracle mismatch: coherence rel err {max_rel:g} > 1e-5",
                   err=True)
        sys.exit(EXIT_ORACLE_MISMATCH)


# ----------------------------------------------------------------------- rmt

@main.group("rmt")
def rmt_group():
    """Random-level ensemble statistics and spectral-function estimates."""


def _draw_realizations(name, M, delta, qbar2, realizations, seed, threads):
    kind, beta = _ENSEMBLES[name]
    ens = rmt.LevelEnsemble(kind=kind, M=M, delta=delta, beta=beta)
    children = np.random.SeedSequence(seed).spawn(realizations)

    def one(r):
        lseed, qseed = (int(x) for x in children[r].generate_state(2))
        return (rmt.sample_levels(ens, lseed),
                rmt.sample_coupling(M, qseed, scale=qbar2))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, range(realizations)))
    return [one(r) for r in range(realizations)]


@rmt_group.command()
@click.option("--ensemble", type=click.Choice(sorted(_ENSEMBLES)), required=True)
@click.option("--m", "-M", "M", type=int, default=1000, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--realizations", type=int, default=1, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--output", "-o", default="spacings", show_default=True)
def spacings(ensemble, M, delta, realizations, seed, output):
    """Empirical nearest-neighbour spacing histogram vs the reference pdf."""
    kind, beta = _ENSEMBLES[ensemble]
    ens = rmt.LevelEnsemble(kind=kind, M=M, delta=delta, beta=beta)
    children = np.random.SeedSequence(seed).spawn(realizations)
    pooled = []
    for ss in children:
        ls = rmt.sample_levels(ens, int(ss.generate_state(1)[0]))
        pooled.append(ls.spacings() / delta)
    s = np.concatenate(pooled)

    bins = np.linspace(0.0, 5.0, 101)
    hist, edges = np.histogram(s, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    tkind, tbeta = _THEORY[ensemble]
    theory = rmt.spacing_pdf(tkind, centers, tbeta)
    _write_csv(output + ".csv", ["s", "empirical_pdf", "theory_pdf"],
               zip(centers, hist, theory))

    s_sorted = np.sort(s)
    cdf_theory = rmt.spacing_cdf(tkind, s_sorted, tbeta)
    n = s_sorted.size
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    ks = float(np.max(np.maximum(np.abs(emp_hi - cdf_theory),
                                 np.abs(cdf_theory - emp_lo))))
    _write_json(output + ".json", {
        "version": __version__,
        "config": {"ensemble": ensemble, "M": M, "delta": delta,
                   "realizations": realizations, "seed": seed},
        "n_spacings": int(n),
        "mean_spacing": float(np.mean(s)),
        "ks_statistic": ks,
    })


def _spectral_options(fn):
    for opt in reversed([
        click.option("--ensemble", type=click.Choice(sorted(_ENSEMBLES)),
                     required=True),
        click.option("--m", "-M", "M", type=int, default=200, show_default=True),
        click.option("--delta", type=float, default=1.0, show_default=True),
        click.option("--qbar2", type=float, default=1.0, show_default=True),
        click.option("--realizations", type=int, default=50, show_default=True),
        click.option("--seed", type=int, required=True),
        click.option("--bandwidth", type=float, default=0.05, show_default=True,
                     help="Gaussian kernel width (same units as delta)"),
        click.option("--omega-min", type=float, default=0.0, show_default=True),
        click.option("--omega-max", type=float, default=2.0, show_default=True),
        click.option("--omega-points", type=int, default=81, show_default=True),
    ]):
        fn = opt(fn)
    return fn


@rmt_group.command()
@_spectral_options
@_threads_option
@click.option("--output", "-o", default="spectral", show_default=True)
def spectral(ensemble, M, delta, qbar2, realizations, seed, bandwidth,
             omega_min, omega_max, omega_points, threads, output):
    """Kernel-smoothed spectral function with bootstrap errors."""
    grid = np.linspace(omega_min, omega_max, omega_points)
    reals = _draw_realizations(ensemble, M, delta, qbar2, realizations, seed,
                               threads)
    try:
        est = rmt.estimate_spectral_function(reals, grid, bandwidth,
                                             boot_seed=seed)
    except InsufficientSamples as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SAMPLES)
    tkind, tbeta = _THEORY[ensemble]
    surmise = rmt.surmise_prediction(tkind, qbar2, grid, delta, tbeta)
    _write_csv(output + ".csv", ["omega", "r_hat", "stderr", "surmise"],
               zip(grid, est.r_hat, est.stderr, np.atleast_1d(surmise)))
    _write_json(output + ".json", {
        "version": __version__,
        "config": {"ensemble": ensemble, "M": M, "delta": delta,
                   "qbar2": qbar2, "realizations": realizations,
                   "seed": seed, "bandwidth": bandwidth},
    })


@rmt_group.command()
@_spectral_options
@_threads_option
@click.option("--output", "-o", default="rate", show_default=True)
def rate(ensemble, M, delta, qbar2, realizations, seed, bandwidth,
         omega_min, omega_max, omega_points, threads, output):
    """Dephasing rate gamma = R(0+)/2 by small-frequency extrapolation."""
    grid = np.linspace(omega_min, omega_max, omega_points)
    reals = _draw_realizations(ensemble, M, delta, qbar2, realizations, seed,
                               threads)
    try:
        est = rmt.estimate_spectral_function(reals, grid, bandwidth,
                                             boot_seed=seed)
        res = rmt.rate_estimate(est)
    except InsufficientSamples as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SAMPLES)
    _write_csv(output + ".csv", ["omega", "r_hat", "stderr"],
               zip(grid, est.r_hat, est.stderr))
    _write_json(output + ".json", {
        "version": __version__,
        "config": {"ensemble": ensemble, "M": M, "delta": delta,
                   "qbar2": qbar2, "realizations": realizations,
                   "seed": seed, "bandwidth": bandwidth},
        "gamma": res.gamma,
        "stderr": res.stderr,
        "window": list(res.window),
        "bandwidth": est.bandwidth,
        "negative_intercept_clipped": res.clipped,
    })


# ----------------------------------------------------------------- meanfield

@main.command("meanfield")
@click.option("--n", "-N", "N", type=int, default=32, show_default=True)
@click.option("--m", "-M", "M", type=int, default=64, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--qbar2", type=float, default=1.0, show_default=True)
@click.option("--ensembles", default="poisson,goe", show_default=True,
              help="comma-separated ensemble names")
@click.option("--realizations", type=int, default=16, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--t-min", type=float, default=1.0, show_default=True)
@click.option("--t-max", type=float, default=1000.0, show_default=True)
@click.option("--t-points", type=int, default=60, show_default=True)
@_threads_option
@click.option("--output", "-o", default="meanfield", show_default=True)
def meanfield_cmd(N, M, delta, qbar2, ensembles, realizations, seed,
                  t_min, t_max, t_points, threads, output):
    """Regular vs chaotic mean-field baths: |Gamma_N(t)| decay comparison."""
    names = [e.strip() for e in ensembles.split(",") if e.strip()]
    for name in names:
        if name not in _ENSEMBLES:
            raise click.UsageError(f"unknown ensemble {name!r}")
    kinds = []
    for name in names:
        kind, beta = _ENSEMBLES[name]
        if beta is not None:
            raise click.UsageError("meanfield supports poisson/goe/gue baths")
        kinds.append(kind)
    t_grid = np.geomspace(t_min, t_max, t_points)
    config = meanfield.MeanFieldConfig(N=N, M=M, delta=delta, qbar2=qbar2,
                                       realizations=realizations, seed=seed,
                                       t_grid=t_grid, ensembles=tuple(kinds))
    try:
        result = meanfield.compare_ensembles(config, threads=threads)
    except DimensionCap as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DIMENSION)

    header = ["t"]
    for name in names:
        header += [f"abs_gamma_{name}", f"stderr_{name[0]}"]
    rows = []
    for i, t in enumerate(t_grid):
        row = [t]
        for kind in kinds:
            c = result.curves[kind]
            row += [c.abs_gamma_mean[i], c.abs_gamma_stderr[i]]
        rows.append(row)
    _write_csv(output + ".csv", header, rows)

    sidecar = {
        "version": __version__,
        "config": {"N": N, "M": M, "delta": delta, "qbar2": qbar2,
                   "ensembles": names, "realizations": realizations,
                   "seed": seed, "t_min": t_min, "t_max": t_max,
                   "t_points": t_points},
        "window": list(result.window),
        "longtime": {
            name: {"mean": result.curves[kind].longtime_mean,
                   "stderr": result.curves[kind].longtime_stderr,
                   "log_mean": result.curves[kind].longtime_log_mean,
                   "log_stderr": result.curves[kind].longtime_log_stderr}
            for name, kind in zip(names, kinds)
        },
    }
    if len(kinds) == 2:
        sep = result.separation_sigmas(kinds[1], kinds[0])
        sidecar["separation_sigmas"] = sep
        sidecar["verdict"] = (f"{names[1]} long-time |Gamma| exceeds"
                              f" {names[0]} at {sep:.2f} sigma")
    _write_json(output + ".json", sidecar)


if __name__ == "__main__":
    main()
