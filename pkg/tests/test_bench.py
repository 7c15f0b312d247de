from advreg.bench import format_table, run_bench


def test_bench_runs_and_formats():
    rows = run_bench(n_train=200, batch=16, repeats=1)
    assert {r["kernel"] for r in rows} == {"forward_batch", "input_grads",
                                           "param_grads", "knn_predict",
                                           "loss_grads"}
    table = format_table(rows)
    assert table.splitlines()[0].startswith("kernel")
    assert len(table.splitlines()) == 6
