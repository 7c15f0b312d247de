import math

import numpy as np
import pytest

from advreg import twopoint
from advreg.perturb import PerturbationSpec
from advreg.train import empirical_risk


def test_true_function_values():
    assert twopoint.true_function([0.3]) == -1.0
    assert twopoint.true_function([0.5]) == pytest.approx(0.0, abs=1e-15)
    assert twopoint.true_function([0.7]) == 1.0


def test_center_constant_formula():
    # balanced atoms with every noise at 0.05 gives c2 = 0.05
    nl = np.full(5, 0.05)
    nr = np.full(5, 0.05)
    c1, c2, c3 = twopoint.closed_form_minimizer(nl, nr)
    assert c2 == pytest.approx(0.05, abs=1e-15)
    assert c1 == pytest.approx(-0.95, abs=1e-15)
    assert c3 == pytest.approx(1.05, abs=1e-15)


def test_zero_noise_minimizer_sits_on_the_plateaus():
    # the outer constants recenter on the plateau levels (ledger entry:
    # the raw offsets would not attain the minimum)
    nl = np.zeros(4)
    nr = np.zeros(4)
    assert twopoint.closed_form_minimizer(nl, nr) == (-1.0, 0.0, 1.0)


def test_unbalanced_counts_shift_center():
    nl = np.zeros(30)
    nr = np.zeros(70)
    _, c2, _ = twopoint.closed_form_minimizer(nl, nr)
    assert c2 == pytest.approx(0.4, abs=1e-15)


def test_l2_risk_formula():
    assert twopoint.l2_risk(0.0) == 1.0
    assert twopoint.l2_risk(0.05) == pytest.approx(1.0025, abs=1e-15)


def test_l2_risk_matches_two_atom_expectation():
    inst, data, nl, nr = twopoint.make_instance(40, seed=3)
    c1, c2, c3 = twopoint.closed_form_minimizer(nl, nr)
    model = twopoint.step_model(c1, c2, c3)
    direct = twopoint.two_point_l2_risk(model)
    assert direct == pytest.approx(twopoint.l2_risk(c2), abs=1e-12)


def test_closed_form_beats_dense_grid():
    for seed in (0, 1, 2):
        _, _, nl, nr = twopoint.make_instance(200, seed=seed)
        c1, c2, c3 = twopoint.closed_form_minimizer(nl, nr)
        closed = twopoint.empirical_adversarial_risk(c1, c2, c3, nl, nr)
        grid = np.round(np.arange(-1.5, 1.5001, 0.05), 10)
        _, grid_best = twopoint.grid_search(nl, nr, grid)
        assert closed <= grid_best + 1e-9
        assert abs(c2) <= 0.2  # interiority condition of the construction


def test_interior_candidates_never_beat_closed_form():
    _, _, nl, nr = twopoint.make_instance(100, seed=7)
    c_star = twopoint.closed_form_minimizer(nl, nr)
    best = twopoint.empirical_adversarial_risk(*c_star, nl, nr)
    rng = np.random.default_rng(0)
    for _ in range(500):
        c1, c3 = rng.uniform(-1.5, 1.5, 2)
        c2 = rng.uniform(-0.2, 0.2)
        risk = twopoint.empirical_adversarial_risk(c1, c2, c3, nl, nr)
        assert risk >= best - 1e-9


def test_closed_form_matches_generic_adversarial_risk():
    # the two-branch formula equals the generic sup-based empirical risk
    # of the piecewise model, resolved by a dense grid inner maximizer
    inst, data, nl, nr = twopoint.make_instance(60, seed=5)
    c1, c2, c3 = twopoint.closed_form_minimizer(nl, nr)
    model = twopoint.step_model(c1, c2, c3)
    pspec = PerturbationSpec(radius=twopoint.RADIUS, order=math.inf)
    generic = empirical_risk(model, data, "adversarial_ordinary",
                             pspec=pspec, inner="grid", grid_points=4001)
    closed = twopoint.empirical_adversarial_risk(c1, c2, c3, nl, nr)
    assert generic == pytest.approx(closed, abs=1e-9)


def test_instance_validation_and_balance():
    with pytest.raises(ValueError):
        twopoint.TwoPointInstance(n=7)
    inst, data, nl, nr = twopoint.make_instance(50, seed=0, d=2)
    assert len(nl) == len(nr) == 25
    assert data.n == 50 and data.d == 2
    # outputs are the plateau levels plus the noises
    assert np.min(data.outputs) >= -1.1 and np.max(data.outputs) <= 1.1
