"""The three estimators: least squares, ordinary adversarial, and
adversarial with preprocessed targets.

Training is minibatch gradient descent; for the adversarial schemes each
sample's worst-case point is recomputed every step and the outer
gradient treats it as a constant. The preprocessed scheme evaluates the
surrogate output at the perturbed points, which is what removes the
bias that makes the ordinary scheme inconsistent.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .losses import LossSpec, loss_batch, loss_grad_batch, make_loss
from .network import Network, NetworkShape, init_params
from .perturb import (PerturbationSpec, feasible_grid, inner_maximize_batch)
from .preprocess import KnnPreprocessor, split_indices

SCHEMES = ("least_squares", "adversarial_ordinary", "adversarial_preprocessed")


class TrainingDiverged(RuntimeError):
    """Non-finite training risk; carries the last finite state."""

    def __init__(self, message, network, history):
        super().__init__(message)
        self.network = network
        self.history = history


@dataclass
class TrainConfig:
    scheme: str
    loss: LossSpec = field(default_factory=lambda: make_loss("squared"))
    perturbation: PerturbationSpec = None
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    knn_k: int = 3
    split_preprocess: bool = False
    depth: int = 3
    width: int = 40
    output_bound: float = 1000.0
    inner_method: str = "pgd"
    grid_points: int = 1024
    warm_start: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme != "least_squares" and self.perturbation is None:
            raise ValueError("adversarial schemes need a perturbation spec")
        if min(self.epochs, self.batch_size) < 1 or self.learning_rate <= 0:
            raise ValueError("epochs, batch_size, learning_rate must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.inner_method not in ("pgd", "grid"):
            raise ValueError(f"unknown inner method {self.inner_method!r}")


@dataclass
class TrainResult:
    network: Network
    history: np.ndarray
    preprocessor: object = None
    epoch_wall_s: np.ndarray = None

    def history_csv(self):
        """epoch,risk,wall_time rows for external inspection."""
        lines = ["epoch,risk,wall_time"]
        for i, risk in enumerate(self.history):
            wall = self.epoch_wall_s[i] if self.epoch_wall_s is not None \
                else float("nan")
            lines.append(f"{i},{float(risk)!r},{float(wall)!r}")
        return "\n".join(lines) + "\n"


def build_shape(d, config):
    """depth layers of the configured width: d -> width.. -> 1."""
    widths = (d,) + (config.width,) * (config.depth - 1) + (1,)
    return NetworkShape(widths=widths, bound=config.output_bound)


def _grid_attack(net, loss_spec, targets, centers, pspec, grid_points):
    """Exact-ish inner max on a dense grid, one center at a time (d <= 2)."""
    fn = net.batch if hasattr(net, "batch") else net
    fixed = not callable(targets)
    xs = np.empty_like(centers)
    vals = np.empty(centers.shape[0])
    for i, center in enumerate(centers):
        grid = feasible_grid(center, pspec, grid_points)
        t = np.full(grid.shape[0], targets[i]) if fixed else targets(grid)
        lv = loss_batch(loss_spec, t, fn(grid))
        j = int(np.argmax(lv))
        xs[i] = grid[j]
        vals[i] = lv[j]
    return xs, vals


def _attack(net, loss_spec, targets, centers, config, rng, extra=None):
    if config.inner_method == "grid":
        return _grid_attack(net, loss_spec, targets, centers,
                            config.perturbation, config.grid_points)
    return inner_maximize_batch(net, loss_spec, targets, centers,
                                config.perturbation, rng, extra_starts=extra)


def empirical_risk(model, data, scheme, loss_spec=None, pspec=None,
                   prep=None, inner="pgd", grid_points=2048, seed=0):
    """Empirical (adversarial) risk of a model on a dataset.

    For the adversarial schemes the per-sample sup is resolved by PGD
    (model must expose gradients) or by a dense grid at d <= 2, which
    also accepts plain callables.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    loss_spec = loss_spec or make_loss("squared")
    fn = model.batch if hasattr(model, "batch") else model
    if scheme == "least_squares":
        return float(np.mean(loss_batch(loss_spec, data.outputs,
                                        fn(data.inputs))))
    if pspec is None:
        raise ValueError("adversarial risk needs a perturbation spec")
    if scheme == "adversarial_preprocessed":
        if prep is None:
            raise ValueError("preprocessed scheme needs a preprocessor")
        targets = prep
    else:
        targets = data.outputs
    if inner == "grid":
        _, vals = _grid_attack(model, loss_spec, targets, data.inputs,
                               pspec, grid_points)
    else:
        if not hasattr(model, "value_and_input_grad"):
            raise TypeError("pgd inner max needs a network-like model; "
                            "use inner='grid' for plain callables (d <= 2)")
        _, vals = inner_maximize_batch(model, loss_spec, targets,
                                       data.inputs, pspec,
                                       np.random.default_rng(seed))
    return float(np.mean(vals))


def _make_optimizer(config, n_params):
    if config.optimizer == "sgd":
        def step(params, grad, state):
            params -= config.learning_rate * grad
            return state
        return step, None
    m = np.zeros(n_params)
    v = np.zeros(n_params)

    def step(params, grad, t):
        t += 1
        m[:] = config.beta1 * m + (1.0 - config.beta1) * grad
        v[:] = config.beta2 * v + (1.0 - config.beta2) * grad * grad
        mhat = m / (1.0 - config.beta1 ** t)
        vhat = v / (1.0 - config.beta2 ** t)
        params -= config.learning_rate * mhat / (np.sqrt(vhat)
                                                 + config.adam_eps)
        return t

    return step, 0


def train(config, data, preprocessor=None):
    """Fit a network under the configured scheme.

    Deterministic per seed; raises TrainingDiverged with the last finite
    state if the objective turns non-finite. The history holds one mean
    minibatch objective per epoch (computed before each update).
    """
    if data.n < 1:
        raise ValueError("dataset is empty")
    ss = np.random.SeedSequence(config.seed)
    init_ss, loop_ss = ss.spawn(2)
    rng = np.random.default_rng(loop_ss)

    train_data = data
    prep = preprocessor
    if config.scheme == "adversarial_preprocessed" and prep is None:
        if config.split_preprocess:
            fit_idx, train_idx = split_indices(data.n, rng)
            prep = KnnPreprocessor(data.inputs[fit_idx],
                                   data.outputs[fit_idx], config.knn_k)
            train_data = data.subset(train_idx)
        else:
            prep = KnnPreprocessor(data.inputs, data.outputs, config.knn_k)

    shape = build_shape(train_data.d, config)
    params = init_params(shape, init_ss)
    net = Network(shape, params)
    opt_step, opt_state = _make_optimizer(config, shape.n_params)

    n = train_data.n
    batch = min(config.batch_size, n)
    warm = train_data.inputs.copy() if config.warm_start else None
    history = []
    walls = []
    last_finite = params.copy()
    for _ in range(config.epochs):
        epoch_start = time.perf_counter()
        perm = rng.permutation(n)
        epoch_sum = 0.0
        for lo in range(0, n, batch):
            idx = perm[lo:lo + batch]
            xb = np.ascontiguousarray(train_data.inputs[idx])
            yb = train_data.outputs[idx]
            if config.scheme == "least_squares":
                xs, targets = xb, yb
            else:
                if config.scheme == "adversarial_preprocessed":
                    attack_targets = prep
                else:
                    attack_targets = yb
                extra = warm[idx] if warm is not None else None
                xs, _ = _attack(net, config.loss, attack_targets, xb,
                                config, rng, extra)
                if warm is not None:
                    warm[idx] = xs
                targets = prep(xs) if config.scheme == \
                    "adversarial_preprocessed" else yb
            preds = net.batch(xs)
            lvals = loss_batch(config.loss, targets, preds)
            if not np.all(np.isfinite(lvals)):
                raise TrainingDiverged("training risk turned non-finite",
                                       Network(shape, last_finite),
                                       np.asarray(history))
            last_finite = params.copy()
            upstream = loss_grad_batch(config.loss, targets,
                                       preds) / len(idx)
            grad = net.param_grad_sum(xs, upstream)
            opt_state = opt_step(params, grad, opt_state)
            epoch_sum += float(lvals.sum())
        history.append(epoch_sum / n)
        walls.append(time.perf_counter() - epoch_start)
    return TrainResult(network=net, history=np.asarray(history),
                       preprocessor=prep, epoch_wall_s=np.asarray(walls))
