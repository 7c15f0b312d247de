"""Experiment runner: train/evaluate over the config grid, emit CSV.

One detail row per (cell, seed), then one aggregate row per cell with
the mean and sample standard deviation over its successful seeds. Rows
are written in canonical sorted order and floats use repr, so a rerun
with the same config is byte-identical apart from the wall_ms column.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import serialize_config
from .datagen import DataGenSpec, NoiseSpec, sample
from .riskeval import make_report
from .train import train

CSV_COLUMNS = ["row_kind", "case", "n", "sigma2", "scheme", "seed", "status",
               "sup_risk", "l2_risk", "train_risk_final", "sup_risk_std",
               "l2_risk_std", "wall_ms"]

_CASE_IDS = {"case1": 1, "case2": 2, "case3": 3, "constant": 4,
             "two_point": 5, "custom": 6}
_SCHEME_IDS = {"least_squares": 1, "adversarial_ordinary": 2,
               "adversarial_preprocessed": 3}


def derive_seeds(seed, cell):
    """Stable (data, train, eval) seeds for one grid point."""
    entropy = [int(seed), _CASE_IDS[cell.case], int(cell.n),
               int(round(cell.sigma2 * 10 ** 9)), _SCHEME_IDS[cell.scheme]]
    children = np.random.SeedSequence(entropy).spawn(3)
    return tuple(int(c.generate_state(1)[0]) for c in children)


def _fmt(v):
    return repr(float(v))


def run_single(config, cell, seed):
    """One detail row; failures are recorded, not raised."""
    start = time.perf_counter()
    row = {"row_kind": "detail", "case": cell.case, "n": str(cell.n),
           "sigma2": _fmt(cell.sigma2), "scheme": cell.scheme,
           "seed": str(seed), "status": "ok", "sup_risk": "",
           "l2_risk": "", "train_risk_final": "", "sup_risk_std": "",
           "l2_risk_std": "", "wall_ms": ""}
    try:
        data_seed, train_seed, eval_seed = derive_seeds(seed, cell)
        spec = DataGenSpec(case=cell.case, n=cell.n,
                           noise=NoiseSpec(kind="gaussian",
                                           sigma2=cell.sigma2),
                           seed=data_seed)
        data = sample(spec)
        result = train(config.train_config(cell.scheme, train_seed), data)
        report = make_report(result.network, data.truth, data.d,
                             m=config.sup_points, seed=eval_seed)
        row["sup_risk"] = _fmt(report.sup_risk)
        row["l2_risk"] = _fmt(report.l2_risk)
        row["train_risk_final"] = _fmt(result.history[-1])
    except Exception as exc:  # keep the sweep alive, record the failure
        row["status"] = f"error:{type(exc).__name__}"
    row["wall_ms"] = _fmt((time.perf_counter() - start) * 1000.0)
    return row


def _run_task(args):
    config, cell, seed = args
    return run_single(config, cell, seed)


def _cell_key(row):
    return (row["case"], int(row["n"]), float(row["sigma2"]), row["scheme"])


def aggregate_rows(detail_rows):
    """Mean/std per cell over its successful detail rows."""
    cells = {}
    for row in detail_rows:
        cells.setdefault(_cell_key(row), []).append(row)
    out = []
    for key in sorted(cells):
        case, n, sigma2, scheme = key
        ok = [r for r in cells[key] if r["status"] == "ok"]
        agg = {"row_kind": "aggregate", "case": case, "n": str(n),
               "sigma2": _fmt(sigma2), "scheme": scheme, "seed": "",
               "status": f"ok:{len(ok)}/{len(cells[key])}",
               "sup_risk": "", "l2_risk": "", "train_risk_final": "",
               "sup_risk_std": "", "l2_risk_std": "", "wall_ms": ""}
        if ok:
            sup = np.array([float(r["sup_risk"]) for r in ok])
            l2 = np.array([float(r["l2_risk"]) for r in ok])
            tr = np.array([float(r["train_risk_final"]) for r in ok])
            agg["sup_risk"] = _fmt(sup.mean())
            agg["l2_risk"] = _fmt(l2.mean())
            agg["train_risk_final"] = _fmt(tr.mean())
            agg["sup_risk_std"] = _fmt(sup.std(ddof=1) if len(ok) > 1 else 0.0)
            agg["l2_risk_std"] = _fmt(l2.std(ddof=1) if len(ok) > 1 else 0.0)
        out.append(agg)
    return out


def run_experiment(config, workers=1):
    """All (cell, seed) runs, canonically sorted, plus aggregates."""
    tasks = [(config, cell, seed) for cell in config.cells()
             for seed in config.seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]
    rows.sort(key=lambda r: (r["case"], int(r["n"]), float(r["sigma2"]),
                             r["scheme"], int(r["seed"])))
    return rows, aggregate_rows(rows)


def write_results_csv(path, config, detail_rows, agg_rows):
    """Atomic write; '#' metadata header records the full configuration."""
    lines = [f"# advreg-results 1 (advreg {__version__})"]
    for cfg_line in serialize_config(config).splitlines():
        lines.append(f"# {cfg_line}" if cfg_line else "#")
    lines.append(",".join(CSV_COLUMNS))
    for row in detail_rows + agg_rows:
        lines.append(",".join(row[c] for c in CSV_COLUMNS))
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_results_csv(path):
    """(metadata lines, rows as dicts)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    header = body[0].split(",")
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected results header {header!r}")
    rows = [dict(zip(header, ln.split(","))) for ln in body[1:]]
    return meta, rows


def all_ok(detail_rows):
    return all(r["status"] == "ok" for r in detail_rows)
