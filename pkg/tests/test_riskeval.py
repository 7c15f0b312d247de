import math

import numpy as np
import pytest

from advreg.network import Network, NetworkShape, init_params
from advreg.perturb import PerturbationSpec
from advreg.riskeval import (RiskReport, adversarial_norm_sq,
                             estimate_lp_risk, estimate_sup_risk, fit_rate,
                             lp_corner_volume, make_report, uniform_points)


def _const(c):
    return lambda x: np.full(x.shape[0], c)


def test_sup_risk_trivia():
    f = _const(0.2)
    assert estimate_sup_risk(f, f, d=1, m=100, seed=0) == 0.0
    g = _const(0.9)
    assert estimate_sup_risk(g, f, d=3, m=100, seed=0) == pytest.approx(
        0.7, abs=1e-15)


def test_sup_risk_matches_dense_grid_oracle():
    shape = NetworkShape(widths=(1, 12, 12, 1), bound=1000.0)
    net = Network(shape, init_params(shape, 6))  # piecewise linear
    zero = _const(0.0)
    grid = np.linspace(0.0, 1.0, 1_000_000)[:, None]
    exact = float(np.max(np.abs(net.batch(grid))))
    mc = estimate_sup_risk(net, zero, d=1, m=100_000, seed=1)
    assert abs(mc - exact) <= 1e-2
    assert mc <= exact + 1e-12


def test_lp_risk_constant_offset_and_zero():
    f, g = _const(0.0), _const(-0.4)
    assert estimate_lp_risk(g, f, d=2, p=3, m=500, seed=0) == pytest.approx(
        0.4, abs=1e-12)
    assert estimate_lp_risk(f, f, d=2, p=2, m=500, seed=0) == 0.0


def test_lp_risk_matches_analytic_integral():
    # |a x| has L2 norm a/sqrt(3) under uniform x
    a = 1.7
    f_hat = lambda x: a * x[:, 0]
    mc = estimate_lp_risk(f_hat, _const(0.0), d=1, p=2, m=100_000, seed=2)
    assert mc == pytest.approx(a / math.sqrt(3.0), rel=0.01)


def test_sup_dominates_lp_on_shared_sample():
    rng = np.random.default_rng(0)
    for trial in range(20):
        shape = NetworkShape(widths=(2, 6, 1), bound=10.0)
        f = Network(shape, init_params(shape, trial))
        g = Network(shape, init_params(shape, 1000 + trial))
        seed = int(rng.integers(1 << 30))
        for p in (1.0, 2.0, 4.0):
            sup = estimate_sup_risk(f, g, d=2, m=400, seed=seed)
            lp = estimate_lp_risk(f, g, d=2, p=p, m=400, seed=seed)
            assert sup >= lp


def test_sup_estimates_nested_in_m():
    shape = NetworkShape(widths=(2, 8, 1), bound=10.0)
    net = Network(shape, init_params(shape, 3))
    vals = [estimate_sup_risk(net, _const(0.0), d=2, m=m, seed=4)
            for m in (100, 1000, 10_000)]
    assert vals[0] <= vals[1] <= vals[2]


def test_adversarial_norm_constant_function():
    spec = PerturbationSpec(radius=0.2)
    pts = uniform_points(2, 50, 0)
    assert adversarial_norm_sq(_const(0.7), pts, spec) == pytest.approx(
        0.49, abs=1e-15)


def test_adversarial_norm_with_covering_radius_is_sup():
    spec = PerturbationSpec(radius=0.999)
    shape = NetworkShape(widths=(1, 10, 1), bound=10.0)
    net = Network(shape, init_params(shape, 5))
    pts = uniform_points(1, 10, 1)
    norm = adversarial_norm_sq(net, pts, spec, grid_points_per_dim=4001)
    grid = np.linspace(0.0, 1.0, 4001)[:, None]
    sup2 = float(np.max(net.batch(grid) ** 2))
    assert norm == pytest.approx(sup2, rel=1e-6)


def test_adversarial_norm_pgd_close_to_grid():
    spec = PerturbationSpec(radius=0.125, restarts=2)
    shape = NetworkShape(widths=(1, 10, 10, 1), bound=1000.0)
    net = Network(shape, init_params(shape, 12))
    pts = uniform_points(1, 40, 2)
    by_grid = adversarial_norm_sq(net, pts, spec, method="grid")
    by_pgd = adversarial_norm_sq(net, pts, spec, method="pgd", seed=0)
    assert by_grid - by_pgd <= 1e-3
    assert by_pgd <= by_grid + 1e-9


def test_adversarial_norm_lower_bound_by_corner_volume():
    # empirical norm^2 >= corner_volume * sup(g^2) - tolerance for a
    # smooth g under uniform evaluation points
    spec = PerturbationSpec(radius=0.25)
    g = lambda x: np.sin(3.0 * x[:, 0]) + 0.5
    pts = uniform_points(1, 2000, 3)
    norm = adversarial_norm_sq(g, pts, spec, grid_points_per_dim=2001)
    grid = np.linspace(0.0, 1.0, 10_001)[:, None]
    sup2 = float(np.max(g(grid) ** 2))
    vol = lp_corner_volume(math.inf, 1, 0.25)
    assert norm >= vol * sup2 - 0.05


def test_corner_volume_closed_forms():
    assert lp_corner_volume(math.inf, 2, 0.5) == pytest.approx(0.25,
                                                               abs=1e-15)
    assert lp_corner_volume(2.0, 1, 0.1) == pytest.approx(0.1, abs=1e-15)
    assert lp_corner_volume(2.0, 2, 0.3) == pytest.approx(
        math.pi / 4.0 * 0.09, abs=1e-12)
    assert lp_corner_volume(1.0, 3, 0.4) == pytest.approx(0.4 ** 3 / 6.0,
                                                          abs=1e-15)


def test_corner_volume_validation():
    with pytest.raises(ValueError):
        lp_corner_volume(2.0, 1, 1.5)
    with pytest.raises(ValueError):
        lp_corner_volume(0.5, 1, 0.5)


def test_rate_fit_exact_power_law():
    n = np.array([400.0, 800.0, 1600.0, 3200.0])
    fit = fit_rate(n, n ** (-2.0 / 3.0))
    assert abs(fit.fitted_exponent - 2.0 / 3.0) <= 1e-9
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_rate_fit_constant_risks():
    fit = fit_rate([100, 200, 400], [0.5, 0.5, 0.5])
    assert fit.fitted_exponent == pytest.approx(0.0, abs=1e-12)


def test_rate_fit_noisy_half_rate():
    rng = np.random.default_rng(8)
    n = np.array([200.0, 400.0, 800.0, 1600.0, 3200.0])
    risks = n ** -0.5 * (1.0 + 0.05 * rng.uniform(-1, 1, len(n)))
    fit = fit_rate(n, risks)
    assert 0.4 <= fit.fitted_exponent <= 0.6


def test_rate_fit_validation():
    with pytest.raises(ValueError):
        fit_rate([100], [0.5])
    with pytest.raises(ValueError):
        fit_rate([100, 200], [0.5, -0.1])


def test_report_fields_and_serialization():
    f, g = _const(0.5), _const(0.0)
    report = make_report(f, g, d=2, m=300, seed=9)
    assert report.sup_risk == pytest.approx(0.5, abs=1e-12)
    assert report.l2_risk == pytest.approx(0.5, abs=1e-12)
    assert report.sup_risk >= report.l2_risk
    assert report.eval_points == 300 and report.seed == 9
    row = report.to_csv_row()
    assert row.split(",")[0] == repr(report.sup_risk)
    assert "sup_risk" in RiskReport.__dataclass_fields__
    record = report.to_record()
    assert record.startswith("advreg-risk-report 1")


def test_report_residual_and_adversarial_norm():
    truth = _const(0.0)
    prep = lambda x: np.full(x.shape[0], 0.1)
    spec = PerturbationSpec(radius=0.2)
    report = make_report(_const(0.3), truth, d=1, m=200, seed=0, prep=prep,
                         pspec=spec, adv_eval_points=20)
    assert report.preprocess_residual_sup == pytest.approx(0.1, abs=1e-12)
    assert report.adversarial_norm_sq == pytest.approx(0.09, abs=1e-12)
