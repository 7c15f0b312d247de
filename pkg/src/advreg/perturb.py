"""Perturbation neighborhoods and the inner maximization.

The feasible set around a center x is the l_p ball of radius h
intersected with the unit cube. The ascent is projected gradient with
sign steps for p = inf and l2-normalized steps for finite p, tracking
the best iterate seen (so the returned value never falls below the
value at the center). A dense-grid maximizer is provided for d <= 2 as
the independent oracle path.
"""

import math
from dataclasses import dataclass

import numpy as np

from .losses import loss_batch, loss_grad_batch


class AscentDiverged(RuntimeError):
    """Raised when the objective turns non-finite during the ascent."""


@dataclass(frozen=True)
class PerturbationSpec:
    radius: float
    order: float = math.inf
    steps: int = 10
    step_size: float = None
    restarts: int = 1

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise ValueError("radius must lie in (0, 1)")
        if self.order < 1.0:
            raise ValueError("order must be >= 1 (math.inf allowed)")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")
        if self.step_size is None:
            object.__setattr__(self, "step_size", self.radius / 4.0)
        elif self.step_size <= 0.0:
            raise ValueError("step_size must be positive")


def _pnorms(v, p):
    if math.isinf(p):
        return np.abs(v).max(axis=1)
    return (np.abs(v) ** p).sum(axis=1) ** (1.0 / p)


def project_batch(centers, candidates, spec):
    """Feasible points nearest-ish to the candidates.

    Exact for p = inf (coordinatewise clamp). For finite p: radial
    scaling onto the ball then box clamp, twice; the clamp never
    increases coordinate offsets, so feasibility survives it.
    """
    h = spec.radius
    if math.isinf(spec.order):
        lo = np.maximum(centers - h, 0.0)
        hi = np.minimum(centers + h, 1.0)
        return np.clip(candidates, lo, hi)
    v = candidates - centers
    for _ in range(2):
        norms = _pnorms(v, spec.order)
        scale = np.where(norms > h, h / np.maximum(norms, 1e-300), 1.0)
        v = v * scale[:, None]
        v = np.clip(centers + v, 0.0, 1.0) - centers
    return centers + v


def project(center, candidate, spec):
    """Single-point version of project_batch."""
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    candidate = np.atleast_1d(np.asarray(candidate, dtype=np.float64))
    return project_batch(center[None, :], candidate[None, :], spec)[0]


def random_starts(centers, spec, rng):
    """Random feasible points near the centers (uniform in the inf-box,
    then projected; start quality is immaterial for a best-of search)."""
    h = spec.radius
    offsets = rng.uniform(-h, h, size=centers.shape)
    return project_batch(centers, centers + offsets, spec)


def maximize_objective(value_grad, centers, spec, rng, extra_starts=None):
    """Best-of PGD ascent of a batched objective over each feasible set.

    value_grad(X) -> (values (m,), grads (m, d)). Returns the best
    iterate and value per row, over the center start, optional extra
    starts (warm starts), `restarts` random starts, and every
    intermediate point.
    """
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    m, _ = centers.shape
    best_x = centers.copy()
    best_v = np.full(m, -np.inf)

    starts = [centers]
    if extra_starts is not None:
        starts.append(project_batch(centers, extra_starts, spec))
    for _ in range(spec.restarts):
        starts.append(random_starts(centers, spec, rng))

    sign_steps = math.isinf(spec.order)
    for x0 in starts:
        x = x0.copy()
        v, g = value_grad(x)
        if not np.all(np.isfinite(v)):
            raise AscentDiverged("objective non-finite; reduce step_size")
        improved = v > best_v
        best_v[improved] = v[improved]
        best_x[improved] = x[improved]
        for _ in range(spec.steps):
            if sign_steps:
                direction = np.sign(g)
            else:
                norms = np.sqrt((g * g).sum(axis=1))
                direction = g / np.maximum(norms, 1e-300)[:, None]
            x = project_batch(centers, x + spec.step_size * direction, spec)
            v, g = value_grad(x)
            if not np.all(np.isfinite(v)):
                raise AscentDiverged("objective non-finite; reduce step_size")
            improved = v > best_v
            best_v[improved] = v[improved]
            best_x[improved] = x[improved]
    return best_x, best_v


def _loss_objective(net, loss_spec, targets):
    """Adversarial objective x' -> l(target(x'), f(x')).

    Callable targets (preprocessed outputs) are re-evaluated at every
    iterate with their input-gradient treated as zero; fixed targets
    stay constant while x' moves.
    """
    fixed = not callable(targets)
    if fixed:
        targets = np.asarray(targets, dtype=np.float64)

    def value_grad(x):
        f, gx = net.value_and_input_grad(x)
        t = targets if fixed else targets(x)
        v = loss_batch(loss_spec, t, f)
        g = loss_grad_batch(loss_spec, t, f)[:, None] * gx
        return v, g

    return value_grad


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


def inner_maximize_batch(net, loss_spec, targets, centers, spec, rng=None,
                         extra_starts=None):
    """Worst-case point and loss per center; deterministic per seed."""
    value_grad = _loss_objective(net, loss_spec, targets)
    return maximize_objective(value_grad, centers, spec, _as_rng(rng),
                              extra_starts)


def inner_maximize(net, loss_spec, target, center, spec, rng=None):
    """Single-center convenience wrapper; target is a real or a callable."""
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    t = target if callable(target) else np.array([float(target)])
    xs, vs = inner_maximize_batch(net, loss_spec, t, center[None, :], spec,
                                  rng)
    return xs[0], float(vs[0])


def feasible_grid(center, spec, points_per_dim):
    """All-feasible grid over the neighborhood, center included (d <= 2)."""
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    d = center.shape[0]
    if d > 2:
        raise ValueError("grid maximization is for d <= 2")
    h = spec.radius
    axes = [np.linspace(max(0.0, c - h), min(1.0, c + h), points_per_dim)
            for c in center]
    if d == 1:
        pts = axes[0][:, None]
    else:
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([g0.ravel(), g1.ravel()])
    if not math.isinf(spec.order):
        keep = _pnorms(pts - center[None, :], spec.order) <= h
        pts = pts[keep]
    return np.vstack([pts, center[None, :]])


def grid_maximize(value_fn, center, spec, points_per_dim=10_000):
    """Dense-grid maximizer of a batched value function (oracle path)."""
    pts = feasible_grid(center, spec, points_per_dim)
    vals = value_fn(pts)
    j = int(np.argmax(vals))
    return pts[j], float(vals[j])
