"""Command-line experiment harness."""

import math
import os
import sys

import click
import numpy as np

from . import twopoint
from .config import expand_full_grid, parse_config
from .harness import all_ok, read_results_csv, run_experiment, \
    write_results_csv
from .perturb import PerturbationSpec
from .riskeval import fit_rate
from .svgplot import emit_plot
from .train import TrainConfig, empirical_risk, train

OUT_DIR_ENV = "ADVREG_OUT_DIR"


def _resolve_out(opt, config_dir):
    return opt or os.environ.get(OUT_DIR_ENV) or config_dir


@click.group()
def main():
    """Adversarially trained regression: experiments and diagnostics."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--workers", default=1, show_default=True,
              help="Concurrent (cell, seed) runs.")
@click.option("--full-grid", is_flag=True,
              help="Expand to the full simulation grid.")
@click.option("--out", default=None, help=f"Output dir (else ${OUT_DIR_ENV} "
                                          "or the config's output_dir).")
def run(config_path, workers, full_grid, out):
    """Run the experiment grid from a TOML config; exit 0 iff all cells ok."""
    config = parse_config(config_path)
    if full_grid:
        config = expand_full_grid(config)
    out_dir = _resolve_out(out, config.output_dir)
    os.makedirs(out_dir, exist_ok=True)
    detail, agg = run_experiment(config, workers=workers)
    csv_path = os.path.join(out_dir, f"{config.name}.csv")
    write_results_csv(csv_path, config, detail, agg)
    click.echo(f"wrote {csv_path} ({len(detail)} detail rows, "
               f"{len(agg)} aggregate rows)")
    if config.plot:
        for case in config.cases:
            for sigma2 in config.noise_variances:
                try:
                    svg = emit_plot(detail, case, sigma2)
                except ValueError as exc:
                    click.echo(f"skipping plot for {case}/{sigma2}: {exc}",
                               err=True)
                    continue
                svg_path = os.path.join(
                    out_dir, f"{config.name}_{case}_sigma{sigma2}.svg")
                with open(svg_path, "w") as fh:
                    fh.write(svg)
                click.echo(f"wrote {svg_path}")
    if not all_ok(detail):
        bad = sum(1 for r in detail if r["status"] != "ok")
        click.echo(f"{bad} runs failed", err=True)
        sys.exit(1)


@main.command("prop1-demo")
@click.option("--n", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--epochs", default=300, show_default=True)
@click.option("--out", default=None)
def two_point_demo(n, seed, epochs, out):
    """Two-atom hard instance: closed-form oracle vs trained networks.

    The ordinary arm runs at the instance's radius 0.5, where it is
    provably inconsistent. The preprocessed arm runs at the simulation
    default 2^-3: at radius 0.5 every neighborhood straddles the
    surrogate's jump between the plateaus, which pins a sup-loss of 1 on
    any continuous fit and makes the flat function an empirical
    minimizer too.
    """
    inst, data, noises_l, noises_r = twopoint.make_instance(n, seed)
    c1, c2, c3 = twopoint.closed_form_minimizer(noises_l, noises_r)
    oracle_adv = twopoint.empirical_adversarial_risk(c1, c2, c3,
                                                     noises_l, noises_r)
    oracle_l2 = twopoint.l2_risk(c2)

    arms = (("adversarial_ordinary", "ordinary",
             PerturbationSpec(radius=twopoint.RADIUS, order=math.inf)),
            ("adversarial_preprocessed", "preprocessed",
             PerturbationSpec(radius=0.125, order=math.inf)))
    rows = {"n": n, "seed": seed, "oracle_adv_risk": oracle_adv,
            "oracle_l2_risk": oracle_l2}
    for scheme, tag, pspec in arms:
        cfg = TrainConfig(scheme=scheme, perturbation=pspec, epochs=epochs,
                          seed=seed, inner_method="grid", grid_points=129)
        result = train(cfg, data)
        rows[f"{tag}_adv_risk"] = empirical_risk(
            result.network, data, scheme, pspec=pspec,
            prep=result.preprocessor, inner="grid")
        rows[f"{tag}_l2_risk"] = twopoint.two_point_l2_risk(result.network)

    header = ",".join(rows)
    line = ",".join(str(v) for v in rows.values())
    click.echo(header)
    click.echo(line)
    if out:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, "prop1_demo.csv")
        with open(path, "w") as fh:
            fh.write(header + "\n" + line + "\n")
        click.echo(f"wrote {path}")


@main.command("rate-fit")
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--value", default="sup_risk", show_default=True)
def rate_fit(csv_path, value):
    """Fit log-log decay exponents per (case, sigma2, scheme)."""
    _, rows = read_results_csv(csv_path)
    groups = {}
    for row in rows:
        if row["row_kind"] != "detail" or row["status"] != "ok":
            continue
        key = (row["case"], row["sigma2"], row["scheme"])
        groups.setdefault(key, {}).setdefault(int(row["n"]), []).append(
            float(row[value]))
    click.echo("case,sigma2,scheme,exponent,r_squared")
    for key in sorted(groups):
        sizes = sorted(groups[key])
        if len(sizes) < 2:
            continue
        means = [float(np.mean(groups[key][n])) for n in sizes]
        fit = fit_rate(sizes, means)
        click.echo(f"{key[0]},{key[1]},{key[2]},"
                   f"{fit.fitted_exponent!r},{fit.r_squared!r}")


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.argument("svg_path", type=click.Path())
@click.option("--case", required=True)
@click.option("--sigma2", required=True, type=float)
@click.option("--value", default="sup_risk", show_default=True)
def plot(csv_path, svg_path, case, sigma2, value):
    """Render an SVG risk-vs-n chart from a results CSV."""
    _, rows = read_results_csv(csv_path)
    svg = emit_plot(rows, case, sigma2, value)
    with open(svg_path, "w") as fh:
        fh.write(svg)
    click.echo(f"wrote {svg_path}")


@main.command()
@click.option("--n-train", default=1600, show_default=True)
@click.option("--batch", default=64, show_default=True)
@click.option("--repeats", default=5, show_default=True)
def bench(n_train, batch, repeats):
    """Time the numba kernels against the numpy fallback."""
    from .bench import format_table, run_bench
    rows = run_bench(n_train=n_train, batch=batch, repeats=repeats)
    click.echo(format_table(rows))


if __name__ == "__main__":
    main()
