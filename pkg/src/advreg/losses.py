"""Regression losses with Lipschitz/lower-bound metadata and a checker.

Each loss l(y, x) is non-negative, zero iff y = x, and ships with
constants (lipschitz C, lower_const c, lower_exp q) asserting

    |l(y, x) - l(y, x')| <= C |x - x'|   and   l(y, x) >= c |y - x|^q

on displacements |y - x| up to 2 * range_bound. For squared, cauchy and
huber the constants are only valid on that bounded range (squared is not
globally Lipschitz; cauchy and huber grow sub-quadratically), which is
why the range travels with the spec.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

KIND_CODES = {"squared": 0, "absolute": 1, "quantile": 2, "cauchy": 3,
              "huber": 4}


@dataclass(frozen=True)
class LossSpec:
    kind: str
    param: float = 0.0
    lipschitz: float = 1.0
    lower_const: float = 1.0
    lower_exp: float = 1.0
    range_bound: float = 10.0

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "quantile" and not 0.0 < self.param < 1.0:
            raise ValueError("quantile level must be in (0, 1)")
        if self.kind in ("cauchy", "huber") and self.param <= 0.0:
            raise ValueError(f"{self.kind} scale must be positive")

    @property
    def code(self):
        return KIND_CODES[self.kind]


def make_loss(kind, param=None, range_bound=10.0):
    """LossSpec with the documented metadata for the given kind.

    range_bound caps |y| and |x|; displacements reach R = 2*range_bound.
    """
    R = 2.0 * range_bound
    if kind == "squared":
        return LossSpec(kind, 0.0, lipschitz=2.0 * R, lower_const=1.0,
                        lower_exp=2.0, range_bound=range_bound)
    if kind == "absolute":
        return LossSpec(kind, 0.0, lipschitz=1.0, lower_const=1.0,
                        lower_exp=1.0, range_bound=range_bound)
    if kind == "quantile":
        tau = 0.5 if param is None else float(param)
        return LossSpec(kind, tau, lipschitz=max(tau, 1.0 - tau),
                        lower_const=min(tau, 1.0 - tau), lower_exp=1.0,
                        range_bound=range_bound)
    if kind == "cauchy":
        kappa = 1.0 if param is None else float(param)
        # log(1 + u) is concave in u = kappa^2 t^2, so the chord from 0
        # to R^2 lower-bounds the loss on |t| <= R
        c = np.log1p(kappa * kappa * R * R) / (R * R)
        return LossSpec(kind, kappa, lipschitz=kappa, lower_const=c,
                        lower_exp=2.0, range_bound=range_bound)
    if kind == "huber":
        delta = 1.0 if param is None else float(param)
        # inf over (0, R] of huber(t)/t^2: 1/2 on the quadratic branch,
        # decreasing on the linear branch, so the value at t = R
        c = min(0.5, delta * (R - 0.5 * delta) / (R * R)) if R > delta else 0.5
        return LossSpec(kind, delta, lipschitz=delta, lower_const=c,
                        lower_exp=2.0, range_bound=range_bound)
    raise ValueError(f"unknown loss kind {kind!r}")


def loss(spec, y, x):
    """l(y, x) at scalars."""
    return float(kernels.loss_values(spec.code, spec.param,
                                     np.array([float(y)]),
                                     np.array([float(x)]))[0])


def loss_grad(spec, y, x):
    """d l(y, x) / dx at scalars; fixed subgradient 0 at kinks."""
    return float(kernels.loss_grads(spec.code, spec.param,
                                    np.array([float(y)]),
                                    np.array([float(x)]))[0])


def loss_batch(spec, y, x):
    return kernels.loss_values(spec.code, spec.param,
                               np.ascontiguousarray(y, dtype=np.float64),
                               np.ascontiguousarray(x, dtype=np.float64))


def loss_grad_batch(spec, y, x):
    return kernels.loss_grads(spec.code, spec.param,
                              np.ascontiguousarray(y, dtype=np.float64),
                              np.ascontiguousarray(x, dtype=np.float64))


@dataclass
class CheckReport:
    """Grid verification of the metadata bounds.

    Gaps are max violations (positive means violated). metadata_ok gates
    on the lower bound, both Lipschitz directions, and zero-iff-equal;
    the swap-symmetry gap is reported but not gated, since e.g. quantile
    losses with tau != 0.5 are intentionally asymmetric.
    """

    lower_gap: float
    lipschitz_gap_x: float
    lipschitz_gap_y: float
    symmetry_gap: float
    zero_ok: bool
    metadata_ok: bool


def check_loss_spec(spec, grid_bound, points=201, tol=1e-9):
    """Verify the LossSpec constants on a dense (y, x) grid."""
    if grid_bound <= 0:
        raise ValueError("grid_bound must be positive")
    g = np.linspace(-grid_bound, grid_bound, points)
    yy, xx = np.meshgrid(g, g, indexing="ij")
    vals = kernels.loss_values(spec.code, spec.param, yy.ravel(), xx.ravel())
    vals = vals.reshape(points, points)

    disp = np.abs(yy - xx)
    lower_gap = float(np.max(spec.lower_const * disp ** spec.lower_exp - vals))

    step = g[1] - g[0]
    lip_x = float(np.max(np.abs(np.diff(vals, axis=1))) - spec.lipschitz * step)
    lip_y = float(np.max(np.abs(np.diff(vals, axis=0))) - spec.lipschitz * step)

    symmetry_gap = float(np.max(np.abs(vals - vals.T)))

    diag = np.diagonal(vals)
    off = vals[~np.eye(points, dtype=bool)]
    zero_ok = bool(np.all(diag == 0.0) and np.all(off > 0.0))

    ok = (lower_gap <= tol and lip_x <= tol and lip_y <= tol and zero_ok)
    return CheckReport(lower_gap=lower_gap, lipschitz_gap_x=lip_x,
                       lipschitz_gap_y=lip_y, symmetry_gap=symmetry_gap,
                       zero_ok=zero_ok, metadata_ok=ok)
