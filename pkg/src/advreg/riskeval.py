"""Risk measurement: Monte-Carlo sup/L^p risks, adversarial norms,
the l_p corner-volume constant, and log-log rate fitting."""

import math
from dataclasses import dataclass

import numpy as np

from .perturb import feasible_grid, maximize_objective

REPORT_CSV_HEADER = ("sup_risk,l2_risk,adversarial_norm_sq,"
                     "preprocess_residual_sup,eval_points,seed")


def _batch_fn(model):
    return model.batch if hasattr(model, "batch") else model


def uniform_points(d, m, seed):
    """Uniform draws on [0,1]^d; the first rows of a larger draw with the
    same seed coincide, so sup estimates are nested in m."""
    return np.random.default_rng(seed).random((m, d))


def estimate_sup_risk(f_hat, f_star, d, m=10_000, seed=0):
    """Max absolute gap over m uniform points."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pts = uniform_points(d, m, seed)
    fh, fs = _batch_fn(f_hat), _batch_fn(f_star)
    return float(np.max(np.abs(fh(pts) - fs(pts))))


def estimate_lp_risk(f_hat, f_star, d, p, m=10_000, seed=0):
    """Monte-Carlo L^p gap under the uniform input law."""
    if p < 1:
        raise ValueError("p must be >= 1")
    pts = uniform_points(d, m, seed)
    fh, fs = _batch_fn(f_hat), _batch_fn(f_star)
    return float(np.mean(np.abs(fh(pts) - fs(pts)) ** p) ** (1.0 / p))


@dataclass
class RiskReport:
    sup_risk: float
    l2_risk: float
    adversarial_norm_sq: float = None
    preprocess_residual_sup: float = None
    eval_points: int = 0
    seed: int = 0

    def to_csv_row(self):
        def fmt(v):
            return "" if v is None else repr(float(v))

        return ",".join([fmt(self.sup_risk), fmt(self.l2_risk),
                         fmt(self.adversarial_norm_sq),
                         fmt(self.preprocess_residual_sup),
                         str(self.eval_points), str(self.seed)])

    def to_record(self):
        lines = ["advreg-risk-report 1"]
        for name in ("sup_risk", "l2_risk", "adversarial_norm_sq",
                     "preprocess_residual_sup", "eval_points", "seed"):
            lines.append(f"{name} {getattr(self, name)!r}")
        return "\n".join(lines) + "\n"


def make_report(f_hat, f_star, d, m=10_000, seed=0, prep=None, pspec=None,
                adv_eval_points=200):
    """Sup and L2 risks on one shared evaluation sample (so the sup
    estimate dominates the L2 estimate exactly), plus optional extras.

    Passing pspec adds the empirical adversarial norm of the gap, which
    runs on the grid maximizer and therefore needs d <= 2.
    """
    pts = uniform_points(d, m, seed)
    fh, fs = _batch_fn(f_hat), _batch_fn(f_star)
    gaps = np.abs(fh(pts) - fs(pts))
    report = RiskReport(sup_risk=float(gaps.max()),
                        l2_risk=float(np.mean(gaps ** 2) ** 0.5),
                        eval_points=m, seed=seed)
    if prep is not None:
        report.preprocess_residual_sup = float(
            np.max(np.abs(prep(pts) - fs(pts))))
    if pspec is not None:
        gap_fn = lambda x: fh(x) - fs(x)
        report.adversarial_norm_sq = adversarial_norm_sq(
            gap_fn, pts[:adv_eval_points], pspec)
    return report


def adversarial_norm_sq(model, points, spec, method="auto",
                        grid_points_per_dim=None, seed=0):
    """Empirical squared adversarial norm: mean over the points of the
    neighborhood-max of model^2.

    The inner max runs on a dense grid at d <= 2 (any batched callable)
    and by PGD otherwise (needs a model exposing value_and_input_grad).
    """
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    d = points.shape[1]
    if method == "auto":
        method = "grid" if d <= 2 else "pgd"
    if method == "grid":
        if d > 2:
            raise ValueError("grid inner max needs d <= 2; use pgd")
        fn = _batch_fn(model)
        if grid_points_per_dim is None:
            grid_points_per_dim = 4001 if d == 1 else 201
        total = 0.0
        for center in points:
            grid = feasible_grid(center, spec, grid_points_per_dim)
            total += float(np.max(fn(grid) ** 2))
        return total / points.shape[0]
    if not hasattr(model, "value_and_input_grad"):
        raise TypeError("pgd inner max needs a network-like model")

    def value_grad(x):
        f, g = model.value_and_input_grad(x)
        return f * f, 2.0 * f[:, None] * g

    rng = np.random.default_rng(seed)
    _, best = maximize_objective(value_grad, points, spec, rng)
    return float(np.mean(best))


def lp_corner_volume(p, d, h):
    """Lebesgue measure of the neighborhood at a corner of the cube:
    Gamma(1/p + 1)^d / Gamma(d/p + 1) * h^d, the worst case over centers
    (a 2^-d wedge of the full l_p ball)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0.0 < h <= 1.0:
        raise ValueError("h must lie in (0, 1]")
    if math.isinf(p):
        return h ** d
    if p < 1:
        raise ValueError("p must be >= 1")
    return math.gamma(1.0 / p + 1.0) ** d / math.gamma(d / p + 1.0) * h ** d


@dataclass
class RateFit:
    sample_sizes: tuple
    risks: tuple
    fitted_exponent: float
    r_squared: float


def fit_rate(sample_sizes, risks):
    """Least-squares slope of log risk against log n; the fitted decay
    exponent is the negated slope."""
    n = np.asarray(sample_sizes, dtype=np.float64)
    r = np.asarray(risks, dtype=np.float64)
    if n.shape != r.shape or n.ndim != 1 or len(n) < 2:
        raise ValueError("need matching lists of length >= 2")
    if np.any(r <= 0.0) or np.any(n <= 0.0):
        raise ValueError("log-log fit needs positive risks and sizes")
    ln, lr = np.log(n), np.log(r)
    slope, intercept = np.polyfit(ln, lr, 1)
    fitted = intercept + slope * ln
    ss_res = float(np.sum((lr - fitted) ** 2))
    ss_tot = float(np.sum((lr - lr.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(sample_sizes=tuple(float(v) for v in n),
                   risks=tuple(float(v) for v in r),
                   fitted_exponent=float(-slope), r_squared=r2)
