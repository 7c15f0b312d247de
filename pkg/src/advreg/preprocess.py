"""Preprocessed surrogate outputs.

A preprocessor is any batched callable Yhat: [0,1]^d -> R with a finite
sup bound, used in place of the raw responses when the adversarial loss
is evaluated at perturbed points. k-NN regression is the shipped
implementation; ExactPreprocessor wraps an arbitrary function (e.g. the
truth itself) for oracle-style tests.
"""

import numpy as np

from . import kernels


class KnnPreprocessor:
    """Mean of the k nearest responses in Euclidean distance.

    Exact brute-force neighbor search; ties at the k-th neighbor break
    toward the lower sample index. The fitted object is immutable and
    evaluation is pure.
    """

    def __init__(self, train_x, train_y, k):
        train_x = np.ascontiguousarray(train_x, dtype=np.float64)
        train_y = np.ascontiguousarray(train_y, dtype=np.float64)
        if train_x.ndim != 2:
            raise ValueError("training inputs must be (n, d)")
        n = train_x.shape[0]
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        self.train_x = train_x
        self.train_y = train_y
        self.k = int(k)
        self.bound = float(np.max(np.abs(train_y))) if n else 0.0

    def __call__(self, x):
        x = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
        if x.shape[1] != self.train_x.shape[1]:
            raise ValueError("query dimension mismatch")
        return kernels.knn_predict(self.train_x, self.train_y, self.k, x)


class ExactPreprocessor:
    """Wraps a batched function as a preprocessor (perfect-oracle case)."""

    def __init__(self, fn, bound=np.inf):
        self.fn = fn
        self.bound = float(bound)

    def __call__(self, x):
        return np.asarray(self.fn(np.atleast_2d(np.asarray(x,
                                                           dtype=np.float64))))


def fit_knn(dataset, k):
    """Fit k-NN preprocessing on a dataset."""
    return KnnPreprocessor(dataset.inputs, dataset.outputs, k)


def evaluate(prep, x):
    """Preprocessed output at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return float(prep(x[None, :])[0])


def split_indices(n, rng):
    """Random 50/50 split; first half for preprocessing, rest for training.

    Keeps the surrogate outputs independent of the samples the estimator
    is fitted on, as required for the general-loss variant.
    """
    perm = rng.permutation(n)
    half = n // 2
    return np.sort(perm[:half]), np.sort(perm[half:])
