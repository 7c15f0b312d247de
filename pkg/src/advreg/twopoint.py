"""Closed-form oracle for the two-atom instance.

Inputs sit on two atoms (first coordinate 0.3 / 0.7) and the target is
-1 on one plateau and +1 on the other, with uniform noise on
[-0.1, 0.1]. Under sup-neighborhoods of radius 0.5 in the max norm,
the ordinary adversarial risk over piecewise-constant fits

    f(x) = c1 on {x1 < 0.2},  c2 on {0.2 <= x1 <= 0.8},  c3 on {x1 > 0.8}

reduces to a two-branch max per sample with an explicit minimizer, whose
population squared risk is 1 + c2^2 >= 1 regardless of the sample size:
plain adversarial fitting cannot be consistent here, while preprocessed
targets remove the bias. The region boundaries are half-open so each
atom's neighborhood ([0, 0.8] and [0.2, 1] in the first coordinate)
meets exactly two plateaus.
"""

from dataclasses import dataclass

import numpy as np

from .datagen import Dataset, two_point_atoms, two_point_truth

RADIUS = 0.5  # fixed with the max norm by the construction
NOISE_HALF_WIDTH = 0.1


@dataclass(frozen=True)
class TwoPointInstance:
    """Balanced two-atom design: n even, half the samples per atom."""

    n: int
    d: int = 1

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError("n must be even and >= 2")
        if self.d < 1:
            raise ValueError("d must be >= 1")

    @property
    def n_left(self):
        return self.n // 2

    @property
    def n_right(self):
        return self.n // 2


def true_function(x):
    """Target value at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return float(two_point_truth(x[None, :])[0])


def make_instance(n, seed, d=1):
    """Instance plus a shuffled dataset and the per-atom noises."""
    inst = TwoPointInstance(n=n, d=d)
    rng = np.random.default_rng(seed)
    noises_left = rng.uniform(-NOISE_HALF_WIDTH, NOISE_HALF_WIDTH, inst.n_left)
    noises_right = rng.uniform(-NOISE_HALF_WIDTH, NOISE_HALF_WIDTH,
                               inst.n_right)
    left, right = two_point_atoms(d)
    x = np.vstack([np.tile(left, (inst.n_left, 1)),
                   np.tile(right, (inst.n_right, 1))])
    y = np.concatenate([-1.0 + noises_left, 1.0 + noises_right])
    perm = rng.permutation(n)
    data = Dataset(inputs=x[perm], outputs=y[perm], truth=two_point_truth)
    return inst, data, noises_left, noises_right


def closed_form_minimizer(noises_left, noises_right):
    """Plateau constants minimizing the ordinary adversarial risk.

    The middle plateau lands at (n2 - n1)/n + mean(noise); the outer
    plateaus fit their own atoms (target level plus local noise mean),
    which parks their branch strictly below the middle one in each
    per-sample max.
    """
    n1 = len(noises_left)
    n2 = len(noises_right)
    all_mean = (np.sum(noises_left) + np.sum(noises_right)) / (n1 + n2)
    c2 = (n2 - n1) / (n1 + n2) + all_mean
    c1 = -1.0 + float(np.mean(noises_left))
    c3 = 1.0 + float(np.mean(noises_right))
    return c1, c2, c3


def empirical_adversarial_risk(c1, c2, c3, noises_left, noises_right):
    """Ordinary adversarial risk of the piecewise fit, in closed form.

    Each left-atom sample sees plateaus c1 and c2 in its neighborhood,
    each right-atom sample sees c2 and c3; the sup is the larger of the
    two squared residuals.
    """
    y_left = -1.0 + np.asarray(noises_left)
    y_right = 1.0 + np.asarray(noises_right)
    left_terms = np.maximum((y_left - c1) ** 2, (y_left - c2) ** 2)
    right_terms = np.maximum((y_right - c2) ** 2, (y_right - c3) ** 2)
    n = len(y_left) + len(y_right)
    return float((left_terms.sum() + right_terms.sum()) / n)


def l2_risk(c2):
    """Population squared risk of the piecewise minimizer: 1 + c2^2."""
    return 1.0 + float(c2) ** 2


def step_model(c1, c2, c3):
    """The piecewise-constant fit as a batched callable.

    The region boundaries sit exactly on the neighborhood endpoints
    (0.3 +- 0.5 and 0.7 -+ 0.5), and float arithmetic puts 0.7 - 0.5 one
    ulp below 0.2; the 1e-9 nudge keeps such endpoint roundoff from
    leaking a far plateau into an atom's neighborhood.
    """

    def f(x):
        x1 = np.atleast_2d(np.asarray(x, dtype=np.float64))[:, 0]
        return np.where(x1 < 0.2 - 1e-9, c1,
                        np.where(x1 > 0.8 + 1e-9, c3, c2))

    return f


def two_point_l2_risk(model, d=1):
    """Exact squared risk under the two-atom design (each atom mass 1/2)."""
    left, right = two_point_atoms(d)
    pts = np.vstack([left, right])
    vals = np.asarray(model(pts), dtype=np.float64)
    truths = two_point_truth(pts)
    return float(0.5 * ((vals[0] - truths[0]) ** 2
                        + (vals[1] - truths[1]) ** 2))


def grid_search(noises_left, noises_right, grid):
    """Exhaustive minimum of the closed-form risk over plateau triples.

    The risk splits as F(c1, c2) + G(c2, c3), so the 3-d search reduces
    to two pairwise tables.
    """
    grid = np.asarray(grid, dtype=np.float64)
    y_left = -1.0 + np.asarray(noises_left)
    y_right = 1.0 + np.asarray(noises_right)
    n = len(y_left) + len(y_right)
    # residual-square tables: (grid, samples)
    r_left = (y_left[None, :] - grid[:, None]) ** 2
    r_right = (y_right[None, :] - grid[:, None]) ** 2
    f_table = np.maximum(r_left[:, None, :], r_left[None, :, :]).sum(axis=2)
    g_table = np.maximum(r_right[:, None, :], r_right[None, :, :]).sum(axis=2)
    best_f = f_table.min(axis=0)       # min over c1, per c2
    best_g = g_table.min(axis=1)       # min over c3, per c2
    totals = (best_f + best_g) / n
    j2 = int(np.argmin(totals))
    j1 = int(np.argmin(f_table[:, j2]))
    j3 = int(np.argmin(g_table[j2, :]))
    return (grid[j1], grid[j2], grid[j3]), float(totals[j2])
