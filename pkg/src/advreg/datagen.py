"""Synthetic regression data: targets, noise families, samplers, CSV io.

The model is Y = f*(X) + xi with X on [0,1]^d (uniform unless the
two-point design is selected) and zero-mean noise independent of X.
"""

from dataclasses import dataclass, field

import numpy as np

CASE_DIMS = {"case1": 1, "case2": 2, "case3": 7}


def case1(x1):
    return 0.3 * np.sin(4.0 * np.pi * x1) - x1 + 0.5


def case2(x1, x2):
    return np.sin(4.0 * np.pi * x1) + np.cos(2.0 * np.pi * x2)


def case3(x):
    # log argument x2^7 x3 + 0.1 >= 0.1 on the cube, so no domain guard
    return (2.0 / (x[:, 0] + 0.01)
            + 3.0 * np.log(x[:, 1] ** 7 * x[:, 2] + 0.1) * x[:, 3]
            + 0.1 * x[:, 4] ** 4 * x[:, 5] ** 2 * x[:, 6])


def two_point_truth(x):
    """Steep ramp between plateaus -1 and +1, driven by the first coordinate."""
    x1 = x[:, 0]
    return np.where(x1 < 0.4, -1.0,
                    np.where(x1 > 0.6, 1.0, 10.0 * (x1 - 0.5)))


def two_point_atoms(d):
    """The two input atoms: first coordinate 0.3 / 0.7, rest at 0.5."""
    left = np.full(d, 0.5)
    right = np.full(d, 0.5)
    left[0] = 0.3
    right[0] = 0.7
    return left, right


def truth_fn(case, constant=0.0, custom=None):
    """Batched f* for a case name."""
    if case == "case1":
        return lambda x: case1(x[:, 0])
    if case == "case2":
        return lambda x: case2(x[:, 0], x[:, 1])
    if case == "case3":
        return case3
    if case == "two_point":
        return two_point_truth
    if case == "constant":
        return lambda x: np.full(x.shape[0], float(constant))
    if case == "custom":
        if custom is None:
            raise ValueError("custom case needs a function")
        return custom
    raise ValueError(f"unknown case {case!r}")


def true_function(case, x, constant=0.0, custom=None):
    """f* at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return float(truth_fn(case, constant, custom)(x[None, :])[0])


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean noise family. student_t is an extension beyond the
    simulation grid, for heavy-tail experiments with robust losses."""

    kind: str = "gaussian"
    sigma2: float = 0.01
    half_width: float = 0.1
    df: float = 3.0
    scale: float = 1.0

    def draw(self, n, rng):
        if self.kind == "gaussian":
            return rng.normal(0.0, np.sqrt(self.sigma2), n)
        if self.kind == "uniform":
            return rng.uniform(-self.half_width, self.half_width, n)
        if self.kind == "student_t":
            return self.scale * rng.standard_t(self.df, n)
        if self.kind == "none":
            return np.zeros(n)
        raise ValueError(f"unknown noise kind {self.kind!r}")


@dataclass(frozen=True)
class DataGenSpec:
    case: str
    n: int
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    d: int = None  # overrides the case default (constant / custom / two_point)
    constant: float = 0.0
    custom: object = None

    def dim(self):
        if self.case in CASE_DIMS:
            return CASE_DIMS[self.case]
        return 1 if self.d is None else int(self.d)


@dataclass
class Dataset:
    inputs: np.ndarray
    outputs: np.ndarray
    truth: object = None  # batched f*, when known

    @property
    def n(self):
        return self.inputs.shape[0]

    @property
    def d(self):
        return self.inputs.shape[1]

    def subset(self, idx):
        return Dataset(self.inputs[idx], self.outputs[idx], self.truth)


def sample(spec):
    """Draw a dataset; deterministic per seed."""
    if spec.n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(spec.seed)
    d = spec.dim()
    if spec.case == "two_point":
        left, right = two_point_atoms(d)
        which = rng.integers(0, 2, spec.n)
        x = np.where(which[:, None] == 0, left[None, :], right[None, :])
    else:
        x = rng.random((spec.n, d))
    f = truth_fn(spec.case, spec.constant, spec.custom)
    xi = spec.noise.draw(spec.n, rng)
    return Dataset(inputs=x, outputs=f(x) + xi, truth=f)


def save_csv(dataset, path):
    """Write inputs/outputs as x1..xd,y rows (truth handle is dropped)."""
    cols = [f"x{j + 1}" for j in range(dataset.d)] + ["y"]
    lines = [",".join(cols)]
    for i in range(dataset.n):
        vals = [repr(float(v)) for v in dataset.inputs[i]]
        vals.append(repr(float(dataset.outputs[i])))
        lines.append(",".join(vals))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    header = lines[0].split(",")
    if header[-1] != "y" or not all(c == f"x{j + 1}"
                                    for j, c in enumerate(header[:-1])):
        raise ValueError(f"unexpected dataset header {header!r}")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return Dataset(inputs=rows[:, :-1], outputs=rows[:, -1])
