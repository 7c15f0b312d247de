"""Fully-connected ReLU networks with gradients in parameters and inputs.

The model is a composition of affine maps with ReLU activations on the
hidden layers and a hard clamp of the scalar output to [-bound, bound].
Parameters live in a single flat float64 array (see kernels.loops for
the layout), which keeps the hot paths numba-friendly and makes
serialization and finite-difference checks trivial.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

FORMAT_TAG = "advreg-net"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class NetworkShape:
    """Widths (input dim first, 1 last) and the output clamp bound."""

    widths: tuple
    bound: float = 1000.0

    def __post_init__(self):
        if len(self.widths) < 2:
            raise ValueError("need at least one layer")
        if any(int(w) < 1 for w in self.widths):
            raise ValueError("widths must be positive")
        if int(self.widths[-1]) != 1:
            raise ValueError("output width must be 1")
        if self.bound < 1.0:
            raise ValueError("output bound must be >= 1")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))

    @property
    def depth(self):
        return len(self.widths) - 1

    @property
    def input_dim(self):
        return self.widths[0]

    @property
    def n_params(self):
        return sum(self.widths[l + 1] * (self.widths[l] + 1)
                   for l in range(self.depth))

    def widths_array(self):
        return np.asarray(self.widths, dtype=np.int64)


@dataclass
class DualGradient:
    """Gradients of the clamped output w.r.t. parameters and the input."""

    param_grads: np.ndarray
    input_grad: np.ndarray


def init_params(shape, seed):
    """He-scaled random weights, zero biases; bit-identical per seed."""
    rng = np.random.default_rng(seed)
    parts = []
    for l in range(shape.depth):
        w_in = shape.widths[l]
        w_out = shape.widths[l + 1]
        a = rng.normal(0.0, np.sqrt(2.0 / w_in), size=(w_out, w_in))
        parts.append(a.ravel())
        parts.append(np.zeros(w_out))
    return np.concatenate(parts)


def _as_batch(x, d):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != d:
        raise ValueError(f"input dimension {x.shape[1]} != network input {d}")
    return np.ascontiguousarray(x)


def forward(params, shape, x):
    """Clamped scalar output at a single point."""
    xb = _as_batch(x, shape.input_dim)
    if xb.shape[0] != 1:
        raise ValueError("forward takes a single point; use forward_batch")
    return float(kernels.forward_batch(params, shape.widths_array(),
                                       shape.bound, xb)[0])


def forward_batch(params, shape, x):
    return kernels.forward_batch(params, shape.widths_array(), shape.bound,
                                 _as_batch(x, shape.input_dim))


def backward(params, shape, x, upstream=1.0):
    """Reverse-mode gradients of upstream * clamped_output at one point."""
    xb = _as_batch(x, shape.input_dim)
    up = np.array([float(upstream)])
    pg = kernels.param_grads(params, shape.widths_array(), shape.bound, xb, up)
    _, ig = kernels.input_grads(params, shape.widths_array(), shape.bound, xb)
    return DualGradient(param_grads=pg, input_grad=ig[0] * float(upstream))


def unpack_params(params, shape):
    """(A_l, b_l) views into the flat array, for inspection and tests."""
    views = []
    off = 0
    for l in range(shape.depth):
        w_in = shape.widths[l]
        w_out = shape.widths[l + 1]
        a = params[off:off + w_out * w_in].reshape(w_out, w_in)
        b = params[off + w_out * w_in:off + w_out * w_in + w_out]
        views.append((a, b))
        off += w_out * w_in + w_out
    return views


class Network:
    """A shape plus a flat parameter vector, with batched evaluation."""

    def __init__(self, shape, params):
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (shape.n_params,):
            raise ValueError("parameter count does not match shape")
        if not np.all(np.isfinite(params)):
            raise ValueError("parameters must be finite")
        self.shape = shape
        self.params = params

    @classmethod
    def initialized(cls, shape, seed):
        return cls(shape, init_params(shape, seed))

    def __call__(self, x):
        return self.batch(x)

    def value(self, x):
        return forward(self.params, self.shape, x)

    def batch(self, x):
        return forward_batch(self.params, self.shape, x)

    def value_and_input_grad(self, x):
        """Batched (outputs, d(output)/d(input)) for the PGD ascent."""
        xb = _as_batch(x, self.shape.input_dim)
        return kernels.input_grads(self.params, self.shape.widths_array(),
                                   self.shape.bound, xb)

    def param_grad_sum(self, x, upstream):
        """Sum over the batch of upstream[s] * grad_params output(x[s])."""
        xb = _as_batch(x, self.shape.input_dim)
        up = np.ascontiguousarray(np.asarray(upstream, dtype=np.float64))
        return kernels.param_grads(self.params, self.shape.widths_array(),
                                   self.shape.bound, xb, up)

    def clone(self):
        return Network(self.shape, self.params.copy())


def save_network(path, shape, params):
    """Versioned structured-text record: header plus row-major weights."""
    lines = [f"{FORMAT_TAG} {FORMAT_VERSION}",
             "widths " + " ".join(str(w) for w in shape.widths),
             f"bound {shape.bound!r}",
             f"params {len(params)}"]
    lines.extend(repr(float(v)) for v in params)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_network(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    tag, version = lines[0].rsplit(" ", 1)
    if tag != FORMAT_TAG or int(version) != FORMAT_VERSION:
        raise ValueError(f"unsupported network record: {lines[0]!r}")
    widths = tuple(int(w) for w in lines[1].split()[1:])
    bound = float(lines[2].split()[1])
    count = int(lines[3].split()[1])
    params = np.array([float(v) for v in lines[4:4 + count]])
    shape = NetworkShape(widths=widths, bound=bound)
    if len(params) != shape.n_params:
        raise ValueError("parameter count mismatch in record")
    return Network(shape, params)
