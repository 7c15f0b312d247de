"""Benchmark the numba kernels against the numpy fallback.

Imports both backends directly (ignoring ADVREG_NO_NUMBA) and times the
four hot kernels plus a PGD-shaped composite on training-sized inputs.
"""

import time

import numpy as np

from .kernels import vector
from .network import NetworkShape, init_params


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(n_train=1600, batch=64, d=1, width=40, repeats=5):
    """Per-kernel best-of timings; returns rows of dicts."""
    try:
        from .kernels import jit
    except ImportError:
        jit = None

    shape = NetworkShape(widths=(d, width, width, 1))
    params = init_params(shape, 0)
    widths = shape.widths_array()
    rng = np.random.default_rng(0)
    xb = rng.random((batch, d))
    up = rng.random(batch)
    train_x = rng.random((n_train, d))
    train_y = rng.random(n_train)
    queries = rng.random((batch, d))
    yv = rng.random(batch)

    cases = [
        ("forward_batch", lambda k: k.forward_batch(params, widths,
                                                    shape.bound, xb)),
        ("input_grads", lambda k: k.input_grads(params, widths,
                                                shape.bound, xb)),
        ("param_grads", lambda k: k.param_grads(params, widths,
                                                shape.bound, xb, up)),
        ("knn_predict", lambda k: k.knn_predict(train_x, train_y, 3,
                                                queries)),
        ("loss_grads", lambda k: k.loss_grads(0, 0.0, yv,
                                              np.zeros(batch))),
    ]

    rows = []
    for name, call in cases:
        if jit is not None:
            call(jit)  # warm the compile cache before timing
        t_np = _time(lambda: call(vector), repeats)
        t_nb = _time(lambda: call(jit), repeats) if jit is not None else None
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb,
                     "speedup": (t_np / t_nb) if t_nb else None})
    return rows


def format_table(rows):
    lines = [f"{'kernel':<16}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}"]
    for r in rows:
        nb = f"{r['numba_s']:.2e}" if r["numba_s"] is not None else "n/a"
        sp = f"{r['speedup']:.1f}x" if r["speedup"] is not None else "n/a"
        lines.append(f"{r['kernel']:<16}{r['numpy_s']:>12.2e}{nb:>12}{sp:>10}")
    return "\n".join(lines)
