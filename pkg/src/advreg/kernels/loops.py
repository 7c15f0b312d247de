"""Loop-style numeric kernels.

These are the hot inner loops of the package, written as plain Python
loops so that `advreg.kernels.jit` can compile them with numba without
changes. `advreg.kernels.vector` holds vectorized numpy equivalents used
as the fallback backend; the two must agree to float64 precision.

Network parameters travel as one flat float64 array. Layer l (0-based)
occupies a row-major (widths[l+1] x widths[l]) weight block followed by
a widths[l+1] bias block. Hidden layers apply ReLU; the final layer is
affine and the output is clamped to [-bound, bound] with zero gradient
in the saturated region.
"""

import numpy as np


def layer_offsets(widths):
    """Start index of each layer's weight block in the flat parameter array."""
    n_layers = widths.shape[0] - 1
    offs = np.empty(n_layers, np.int64)
    acc = 0
    for l in range(n_layers):
        offs[l] = acc
        acc += widths[l + 1] * widths[l] + widths[l + 1]
    return offs


def forward_batch(params, widths, bound, x):
    """Clamped network output for each row of x."""
    m = x.shape[0]
    n_layers = widths.shape[0] - 1
    wmax = 1
    for i in range(widths.shape[0]):
        if widths[i] > wmax:
            wmax = widths[i]
    offs = np.empty(n_layers, np.int64)
    acc = 0
    for l in range(n_layers):
        offs[l] = acc
        acc += widths[l + 1] * widths[l] + widths[l + 1]
    cur = np.empty(wmax)
    nxt = np.empty(wmax)
    out = np.empty(m)
    for s in range(m):
        for i in range(widths[0]):
            cur[i] = x[s, i]
        for l in range(n_layers):
            w_in = widths[l]
            w_out = widths[l + 1]
            boff = offs[l] + w_out * w_in
            for j in range(w_out):
                z = params[boff + j]
                base = offs[l] + j * w_in
                for i in range(w_in):
                    z += params[base + i] * cur[i]
                if l < n_layers - 1 and z < 0.0:
                    z = 0.0
                nxt[j] = z
            for j in range(w_out):
                cur[j] = nxt[j]
        y = cur[0]
        if y > bound:
            y = bound
        elif y < -bound:
            y = -bound
        out[s] = y
    return out


def input_grads(params, widths, bound, x):
    """Clamped outputs and their gradients w.r.t. each input row.

    ReLU kinks and the clamp's saturated region both contribute
    subgradient zero.
    """
    m = x.shape[0]
    d = x.shape[1]
    n_layers = widths.shape[0] - 1
    wmax = 1
    for i in range(widths.shape[0]):
        if widths[i] > wmax:
            wmax = widths[i]
    offs = np.empty(n_layers, np.int64)
    acc = 0
    for l in range(n_layers):
        offs[l] = acc
        acc += widths[l + 1] * widths[l] + widths[l + 1]
    acts = np.empty((n_layers + 1, wmax))
    delta = np.empty(wmax)
    prev = np.empty(wmax)
    out = np.empty(m)
    grads = np.zeros((m, d))
    for s in range(m):
        for i in range(widths[0]):
            acts[0, i] = x[s, i]
        for l in range(n_layers):
            w_in = widths[l]
            w_out = widths[l + 1]
            boff = offs[l] + w_out * w_in
            for j in range(w_out):
                z = params[boff + j]
                base = offs[l] + j * w_in
                for i in range(w_in):
                    z += params[base + i] * acts[l, i]
                if l < n_layers - 1 and z < 0.0:
                    z = 0.0
                acts[l + 1, j] = z
        raw = acts[n_layers, 0]
        y = raw
        if y > bound:
            y = bound
        elif y < -bound:
            y = -bound
        out[s] = y
        if raw > bound or raw < -bound:
            continue  # saturated: grads row stays zero
        delta[0] = 1.0
        for l in range(n_layers - 1, -1, -1):
            w_in = widths[l]
            w_out = widths[l + 1]
            for i in range(w_in):
                g = 0.0
                for j in range(w_out):
                    g += params[offs[l] + j * w_in + i] * delta[j]
                prev[i] = g
            if l > 0:
                for i in range(w_in):
                    if acts[l, i] <= 0.0:
                        prev[i] = 0.0
            for i in range(w_in):
                delta[i] = prev[i]
        for i in range(d):
            grads[s, i] = delta[i]
    return out, grads


def param_grads(params, widths, bound, x, upstream):
    """Sum over the batch of upstream[s] * d(output)/d(params) at x[s]."""
    m = x.shape[0]
    n_layers = widths.shape[0] - 1
    wmax = 1
    for i in range(widths.shape[0]):
        if widths[i] > wmax:
            wmax = widths[i]
    offs = np.empty(n_layers, np.int64)
    acc = 0
    for l in range(n_layers):
        offs[l] = acc
        acc += widths[l + 1] * widths[l] + widths[l + 1]
    grad = np.zeros(params.shape[0])
    acts = np.empty((n_layers + 1, wmax))
    delta = np.empty(wmax)
    prev = np.empty(wmax)
    for s in range(m):
        for i in range(widths[0]):
            acts[0, i] = x[s, i]
        for l in range(n_layers):
            w_in = widths[l]
            w_out = widths[l + 1]
            boff = offs[l] + w_out * w_in
            for j in range(w_out):
                z = params[boff + j]
                base = offs[l] + j * w_in
                for i in range(w_in):
                    z += params[base + i] * acts[l, i]
                if l < n_layers - 1 and z < 0.0:
                    z = 0.0
                acts[l + 1, j] = z
        raw = acts[n_layers, 0]
        if raw > bound or raw < -bound:
            continue
        delta[0] = upstream[s]
        for l in range(n_layers - 1, -1, -1):
            w_in = widths[l]
            w_out = widths[l + 1]
            boff = offs[l] + w_out * w_in
            for j in range(w_out):
                dj = delta[j]
                base = offs[l] + j * w_in
                for i in range(w_in):
                    grad[base + i] += dj * acts[l, i]
                grad[boff + j] += dj
            for i in range(w_in):
                g = 0.0
                for j in range(w_out):
                    g += params[offs[l] + j * w_in + i] * delta[j]
                prev[i] = g
            if l > 0:
                for i in range(w_in):
                    if acts[l, i] <= 0.0:
                        prev[i] = 0.0
            for i in range(w_in):
                delta[i] = prev[i]
    return grad


def knn_predict(train_x, train_y, k, queries):
    """Mean response of the k nearest training points (Euclidean).

    Distance ties at the k-th slot resolve to the lower sample index:
    the scan runs in index order with strict comparisons, so an earlier
    equal-distance point is never displaced.
    """
    n = train_x.shape[0]
    d = train_x.shape[1]
    m = queries.shape[0]
    out = np.empty(m)
    best_d = np.empty(k)
    best_i = np.empty(k, np.int64)
    for s in range(m):
        for j in range(k):
            best_d[j] = np.inf
            best_i[j] = -1
        for t in range(n):
            dist = 0.0
            for c in range(d):
                diff = train_x[t, c] - queries[s, c]
                dist += diff * diff
            if dist < best_d[k - 1]:
                j = k - 1
                while j > 0 and best_d[j - 1] > dist:
                    best_d[j] = best_d[j - 1]
                    best_i[j] = best_i[j - 1]
                    j -= 1
                best_d[j] = dist
                best_i[j] = t
        acc = 0.0
        for j in range(k):
            acc += train_y[best_i[j]]
        out[s] = acc / k
    return out


# Loss kind codes shared with advreg.losses: 0 squared, 1 absolute,
# 2 quantile(param=tau), 3 cauchy(param=kappa), 4 huber(param=delta).


def loss_values(kind, param, target, pred):
    """Pointwise loss l(target, pred) for one kind code."""
    m = target.shape[0]
    out = np.empty(m)
    for s in range(m):
        t = target[s] - pred[s]
        if kind == 0:
            v = t * t
        elif kind == 1:
            v = abs(t)
        elif kind == 2:
            v = param * t if t >= 0.0 else (param - 1.0) * t
        elif kind == 3:
            v = np.log1p(param * param * t * t)
        else:
            a = abs(t)
            if a <= param:
                v = 0.5 * t * t
            else:
                v = param * (a - 0.5 * param)
        out[s] = v
    return out


def loss_grads(kind, param, target, pred):
    """Derivative of l(target, pred) in pred; subgradient 0 at kinks."""
    m = target.shape[0]
    out = np.empty(m)
    for s in range(m):
        t = target[s] - pred[s]
        if kind == 0:
            g = -2.0 * t
        elif kind == 1:
            if t > 0.0:
                g = -1.0
            elif t < 0.0:
                g = 1.0
            else:
                g = 0.0
        elif kind == 2:
            if t > 0.0:
                g = -param
            elif t < 0.0:
                g = 1.0 - param
            else:
                g = 0.0
        elif kind == 3:
            g = -2.0 * param * param * t / (1.0 + param * param * t * t)
        else:
            if abs(t) <= param:
                g = -t
            elif t > 0.0:
                g = -param
            else:
                g = param
        out[s] = g
    return out
