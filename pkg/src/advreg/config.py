"""Experiment configuration: TOML in, TOML out.

The schema is a handful of flat tables (experiment, data, schemes,
architecture, perturbation, preprocessing, training, evaluation); see
configs/case1.toml for a checked-in example. parse -> serialize ->
parse is the identity on the parsed object.
"""

import math
from dataclasses import dataclass, field, replace
from itertools import product

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from .losses import make_loss
from .perturb import PerturbationSpec
from .train import TrainConfig

FULL_GRID_SAMPLE_SIZES = (400, 800, 1200, 1600)
FULL_GRID_NOISE_VARIANCES = (0.0001, 0.01, 1.0)
FULL_GRID_SEEDS = tuple(range(10))


@dataclass(frozen=True)
class Cell:
    case: str
    n: int
    sigma2: float
    scheme: str


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    seeds: tuple = (0, 1, 2, 3, 4)
    output_dir: str = "results"
    plot: bool = True
    cases: tuple = ("case1",)
    sample_sizes: tuple = (400, 1600)
    noise_variances: tuple = (0.01,)
    schemes: tuple = ("least_squares", "adversarial_ordinary",
                      "adversarial_preprocessed")
    depth: int = 3
    width: int = 40
    output_bound: float = 1000.0
    h: float = 0.125
    p: float = math.inf
    steps: int = 10
    restarts: int = 1
    step_size: float = None
    knn_k: int = 3
    split_preprocess: bool = False
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 0.001
    optimizer: str = "adam"
    loss_kind: str = "squared"
    loss_param: float = None
    inner_method: str = "pgd"
    sup_points: int = 10000

    def cells(self):
        return [Cell(case, n, sigma2, scheme)
                for case, n, sigma2, scheme in product(
                    self.cases, self.sample_sizes, self.noise_variances,
                    self.schemes)]

    def perturbation_spec(self):
        return PerturbationSpec(radius=self.h, order=self.p,
                                steps=self.steps, step_size=self.step_size,
                                restarts=self.restarts)

    def train_config(self, scheme, seed):
        return TrainConfig(scheme=scheme,
                           loss=make_loss(self.loss_kind, self.loss_param),
                           perturbation=self.perturbation_spec(),
                           epochs=self.epochs, batch_size=self.batch_size,
                           learning_rate=self.learning_rate,
                           optimizer=self.optimizer, seed=seed,
                           knn_k=self.knn_k,
                           split_preprocess=self.split_preprocess,
                           depth=self.depth, width=self.width,
                           output_bound=self.output_bound,
                           inner_method=self.inner_method)


def expand_full_grid(config):
    """The full simulation grid (the checked-in defaults are desk-scale)."""
    return replace(config, sample_sizes=FULL_GRID_SAMPLE_SIZES,
                   noise_variances=FULL_GRID_NOISE_VARIANCES,
                   seeds=FULL_GRID_SEEDS)


def _parse_p(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        return float(value)
    return float(value)


def parse_config_text(text):
    raw = tomllib.loads(text)
    kwargs = {}
    exp = raw.get("experiment", {})
    for key in ("name", "output_dir"):
        if key in exp:
            kwargs[key] = exp[key]
    if "seeds" in exp:
        kwargs["seeds"] = tuple(int(s) for s in exp["seeds"])
    if "plot" in exp:
        kwargs["plot"] = bool(exp["plot"])
    data = raw.get("data", {})
    if "cases" in data:
        kwargs["cases"] = tuple(data["cases"])
    if "sample_sizes" in data:
        kwargs["sample_sizes"] = tuple(int(n) for n in data["sample_sizes"])
    if "noise_variances" in data:
        kwargs["noise_variances"] = tuple(float(v)
                                          for v in data["noise_variances"])
    if "names" in raw.get("schemes", {}):
        kwargs["schemes"] = tuple(raw["schemes"]["names"])
    arch = raw.get("architecture", {})
    for key in ("depth", "width"):
        if key in arch:
            kwargs[key] = int(arch[key])
    if "output_bound" in arch:
        kwargs["output_bound"] = float(arch["output_bound"])
    pert = raw.get("perturbation", {})
    if "h" in pert:
        kwargs["h"] = float(pert["h"])
    if "p" in pert:
        kwargs["p"] = _parse_p(pert["p"])
    for key in ("steps", "restarts"):
        if key in pert:
            kwargs[key] = int(pert[key])
    if "step_size" in pert:
        kwargs["step_size"] = float(pert["step_size"])
    prep = raw.get("preprocessing", {})
    if "k" in prep:
        kwargs["knn_k"] = int(prep["k"])
    if "split" in prep:
        kwargs["split_preprocess"] = bool(prep["split"])
    tr = raw.get("training", {})
    for key in ("epochs", "batch_size"):
        if key in tr:
            kwargs[key] = int(tr[key])
    if "learning_rate" in tr:
        kwargs["learning_rate"] = float(tr["learning_rate"])
    for key in ("optimizer", "inner_method"):
        if key in tr:
            kwargs[key] = tr[key]
    if "loss" in tr:
        kwargs["loss_kind"] = tr["loss"]
    if "loss_param" in tr:
        kwargs["loss_param"] = float(tr["loss_param"])
    ev = raw.get("evaluation", {})
    if "sup_points" in ev:
        kwargs["sup_points"] = int(ev["sup_points"])
    return ExperimentConfig(**kwargs)


def parse_config(path):
    with open(path, "rb") as fh:
        return parse_config_text(fh.read().decode())


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return '"inf"'
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize_config(config):
    sections = {
        "experiment": {"name": config.name, "seeds": list(config.seeds),
                       "output_dir": config.output_dir, "plot": config.plot},
        "data": {"cases": list(config.cases),
                 "sample_sizes": list(config.sample_sizes),
                 "noise_variances": list(config.noise_variances)},
        "schemes": {"names": list(config.schemes)},
        "architecture": {"depth": config.depth, "width": config.width,
                         "output_bound": config.output_bound},
        "perturbation": {"h": config.h, "p": config.p,
                         "steps": config.steps, "restarts": config.restarts},
        "preprocessing": {"k": config.knn_k,
                          "split": config.split_preprocess},
        "training": {"epochs": config.epochs,
                     "batch_size": config.batch_size,
                     "learning_rate": config.learning_rate,
                     "optimizer": config.optimizer,
                     "inner_method": config.inner_method,
                     "loss": config.loss_kind},
        "evaluation": {"sup_points": config.sup_points},
    }
    if config.step_size is not None:
        sections["perturbation"]["step_size"] = config.step_size
    if config.loss_param is not None:
        sections["training"]["loss_param"] = config.loss_param
    lines = []
    for section, entries in sections.items():
        lines.append(f"[{section}]")
        for key, value in entries.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)
