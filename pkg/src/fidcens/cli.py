"""Command-line front end: fit, npmle, and simulate subcommands.

Exit codes: 0 success, 2 usage or input parse errors, 3 numerical
faults. Every output embeds provenance (flags, seed, version): JSON in a
metadata object, text formats as leading # comment lines.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .data import default_grid, parse_dataset
from .errors import NumericalError, ParseError
from .gibbs import GibbsConfig, run
from .inference import conservative_ci, interpolation_ci
from .npmle import evaluate, fit_em
from .simulate import get_scenario, run_experiment


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load(input_path: str):
    try:
        return parse_dataset(input_path)
    except ParseError as exc:
        raise click.UsageError(str(exc)) from exc


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy)


def _time_json(x: float):
    # JSON has no literal for infinity; match the CSV convention
    return "inf" if math.isinf(x) else float(x)


def _comment_provenance(command: str, pairs: list[tuple[str, object]]) -> str:
    body = " ".join(f"{k}={v}" for k, v in pairs)
    return f"# fidcens {command} v{__version__} {body}\n"


@click.group()
@click.version_option(version=__version__, prog_name="fidcens")
def main():
    """Fiducial inference for interval-censored survival data."""


@main.command()
@click.argument("input_path", metavar="INPUT", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid-size", default=100, show_default=True,
              help="Number of grid intervals on [0, max finite endpoint].")
@click.option("--n-mcmc", default=1000, show_default=True, help="Samples kept after burn-in.")
@click.option("--burn-in", default=100, show_default=True, help="Sweeps discarded up front.")
@click.option("--seed", type=int, default=None, help="RNG seed; drawn and recorded if unset.")
@click.option("--alpha", default=0.05, show_default=True, help="Two-sided CI level is 1 - alpha.")
@click.option("--method", type=click.Choice(["interpolation", "conservative", "both"]),
              default="interpolation", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file; stdout if unset.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--dump-samples", is_flag=True, help="Include per-sample curves (JSON only).")
def fit(input_path, grid_size, n_mcmc, burn_in, seed, alpha, method, out, fmt, dump_samples):
    """Fit fiducial curve estimates and confidence bands to a dataset.

    INPUT is a CSV with header l,r; one row per observation, r empty or
    "inf" for right-censored, l == r for exact event times.
    """
    if not 0.0 < alpha < 1.0:
        raise click.UsageError("--alpha must be strictly between 0 and 1")
    if grid_size < 1:
        raise click.UsageError("--grid-size must be at least 1")
    if n_mcmc < 2:
        raise click.UsageError("--n-mcmc must be at least 2")
    if burn_in < 0:
        raise click.UsageError("--burn-in must be nonnegative")
    if fmt == "csv" and method == "both":
        raise click.UsageError("csv holds one interval pair per row; use --format json with --method both")
    if fmt == "csv" and dump_samples:
        raise click.UsageError("per-sample curves are JSON only")

    ds = _load(input_path)
    try:
        grid = default_grid(ds, grid_size + 1)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if seed is None:
        seed = _fresh_seed()
    cfg = GibbsConfig(n_mcmc=n_mcmc, n_burn=burn_in, seed=seed)

    try:
        samples = run(ds, grid, cfg)
        estimates = {}
        if method in ("interpolation", "both"):
            estimates["interpolation"] = interpolation_ci(samples, grid, alpha)
        if method in ("conservative", "both"):
            estimates["conservative"] = conservative_ci(samples, grid, alpha)
    except NumericalError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)

    flags = [("input", input_path), ("grid-size", grid_size), ("n-mcmc", n_mcmc),
             ("burn-in", burn_in), ("alpha", alpha), ("method", method), ("seed", seed)]
    if fmt == "json":
        bundle = {
            "metadata": {
                "tool": "fidcens",
                "version": __version__,
                "command": "fit",
                "input": input_path,
                "grid_size": grid_size,
                "n_mcmc": n_mcmc,
                "burn_in": burn_in,
                "alpha": alpha,
                "method": method,
                "seed": seed,
                "dump_samples": bool(dump_samples),
            },
            "grid": grid.times.tolist(),
            "estimates": {
                name: {
                    "point": est.point.tolist(),
                    "lower": est.ci_lower.tolist(),
                    "upper": est.ci_upper.tolist(),
                }
                for name, est in estimates.items()
            },
        }
        if dump_samples:
            bundle["samples"] = {
                "lower": [s.lower_on_grid.tolist() for s in samples],
                "upper": [s.upper_on_grid.tolist() for s in samples],
                "interpolation": [s.interp_on_grid.tolist() for s in samples],
            }
        _emit(json.dumps(bundle, indent=2) + "\n", out)
    else:
        est = estimates[method]
        lines = [_comment_provenance("fit", flags).rstrip("\n"), "t,point,lower,upper"]
        for t, p, lo, hi in zip(grid.times, est.point, est.ci_lower, est.ci_upper):
            lines.append(f"{float(t)!r},{float(p)!r},{float(lo)!r},{float(hi)!r}")
        _emit("\n".join(lines) + "\n", out)


@main.command()
@click.argument("input_path", metavar="INPUT", type=click.Path(exists=True, dir_okay=False))
@click.option("--rule", type=click.Choice(["interpolation", "left", "right"]),
              default="interpolation", show_default=True,
              help="CDF convention inside maximal intersection intervals.")
@click.option("--tol", default=1e-9, show_default=True, help="EM stopping tolerance (max-norm).")
@click.option("--max-iter", default=100_000, show_default=True)
@click.option("--grid-size", default=100, show_default=True,
              help="Number of grid intervals for the evaluated CDF.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file; stdout if unset.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def npmle(input_path, rule, tol, max_iter, grid_size, out, fmt):
    """Turnbull NPMLE: maximal intersection intervals, masses, CDF on a grid."""
    if not tol > 0.0:
        raise click.UsageError("--tol must be positive")
    if max_iter < 1:
        raise click.UsageError("--max-iter must be at least 1")
    if grid_size < 1:
        raise click.UsageError("--grid-size must be at least 1")

    ds = _load(input_path)
    try:
        grid = default_grid(ds, grid_size + 1)
        result = fit_em(ds, tol=tol, max_iter=max_iter)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    except NumericalError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    if not result.converged:
        click.echo(f"warning: EM did not converge within {max_iter} iterations", err=True)
    cdf = evaluate(result, grid.times, rule)

    flags = [("input", input_path), ("rule", rule), ("tol", tol), ("max-iter", max_iter),
             ("grid-size", grid_size), ("converged", result.converged)]
    if fmt == "json":
        bundle = {
            "metadata": {
                "tool": "fidcens",
                "version": __version__,
                "command": "npmle",
                "input": input_path,
                "rule": rule,
                "tol": tol,
                "max_iter": max_iter,
                "grid_size": grid_size,
            },
            "converged": result.converged,
            "n_iter": result.n_iter,
            "loglik": result.loglik,
            "intervals": {
                "lower": [_time_json(x) for x in result.intervals.p],
                "upper": [_time_json(x) for x in result.intervals.q],
                "lower_closed": result.intervals.lower_closed.tolist(),
                "mass": result.masses.tolist(),
            },
            "curve": {"t": grid.times.tolist(), "cdf": cdf.tolist()},
        }
        _emit(json.dumps(bundle, indent=2) + "\n", out)
    else:
        lines = [_comment_provenance("npmle", flags).rstrip("\n"), "t,cdf"]
        for t, f in zip(grid.times, cdf):
            lines.append(f"{float(t)!r},{float(f)!r}")
        _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--scenario", "scenarios", type=int, multiple=True, required=True,
              help="Study design 1..4; repeat for several.")
@click.option("--n", "sizes", type=int, multiple=True, required=True,
              help="Sample size; repeat for several.")
@click.option("--reps", type=int, required=True, help="Replicates per (scenario, n) cell.")
@click.option("--seed", type=int, default=None, help="Master seed; drawn and recorded if unset.")
@click.option("--jobs", default=1, show_default=True, help="Worker processes.")
@click.option("--n-mcmc", default=1000, show_default=True)
@click.option("--burn-in", default=100, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the table to a file.")
def simulate(scenarios, sizes, reps, seed, jobs, n_mcmc, burn_in, out):
    """Coverage and MSE study; one table row per (scenario, n) cell.

    Rates are percents, widths raw, MSE columns scaled by 1e4. Each
    cell's replicate streams depend only on (seed, scenario, n), so
    results are identical for any --jobs and any cell selection.
    """
    try:
        chosen = [get_scenario(s) for s in scenarios]
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if reps < 1:
        raise click.UsageError("--reps must be at least 1")
    if jobs < 1:
        raise click.UsageError("--jobs must be at least 1")
    if any(n < 1 for n in sizes):
        raise click.UsageError("--n must be at least 1")
    if n_mcmc < 1:
        raise click.UsageError("--n-mcmc must be at least 1")
    if burn_in < 0:
        raise click.UsageError("--burn-in must be nonnegative")
    if seed is None:
        seed = _fresh_seed()

    rows = []
    for sc in chosen:
        for n in sizes:
            cell_seq = np.random.SeedSequence(entropy=seed, spawn_key=(int(sc.id[1:]), n))
            cfg = GibbsConfig(n_mcmc=n_mcmc, n_burn=burn_in, seed=cell_seq)
            try:
                rows.append(run_experiment(sc, n, reps, cfg=cfg, jobs=jobs))
            except NumericalError as exc:
                click.echo(f"error: {exc}", err=True)
                sys.exit(3)

    header = (f"{'scenario':>8} {'n':>6} {'reps':>6} {'lr%':>6} {'ur%':>6} {'width':>7} "
              f"{'mse_fid':>8} {'mse_i':>8} {'mse_l':>8} {'mse_r':>8}")
    lines = [
        _comment_provenance("simulate", [
            ("seed", seed), ("reps", reps), ("n-mcmc", n_mcmc), ("burn-in", burn_in),
            ("jobs", jobs),
            ("scenarios", ",".join(str(s) for s in scenarios)),
            ("n", ",".join(str(n) for n in sizes)),
        ]).rstrip("\n"),
        header,
    ]
    for r in rows:
        lines.append(
            f"{r.scenario.id:>8} {r.n:>6d} {r.reps:>6d} "
            f"{100.0 * r.lr:>6.1f} {100.0 * r.ur:>6.1f} {r.width:>7.3f} "
            f"{1e4 * r.mse_fiducial:>8.1f} {1e4 * r.mse_npmle_i:>8.1f} "
            f"{1e4 * r.mse_npmle_l:>8.1f} {1e4 * r.mse_npmle_r:>8.1f}"
        )
    text = "\n".join(lines) + "\n"
    click.echo(text, nl=False)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
