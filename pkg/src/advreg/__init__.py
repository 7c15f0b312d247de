"""Adversarially trained ReLU-network regression with preprocessing,
plus sup-norm risk measurement harnesses."""

__version__ = "0.1.0"

from .datagen import DataGenSpec, Dataset, NoiseSpec, sample, true_function
from .kernels import BACKEND
from .losses import LossSpec, check_loss_spec, loss, loss_grad, make_loss
from .network import (DualGradient, Network, NetworkShape, backward, forward,
                      init_params, load_network, save_network)
from .perturb import (AscentDiverged, PerturbationSpec, grid_maximize,
                      inner_maximize, project)
from .preprocess import ExactPreprocessor, KnnPreprocessor, evaluate, fit_knn
from .riskeval import (RateFit, RiskReport, adversarial_norm_sq,
                       estimate_lp_risk, estimate_sup_risk, fit_rate,
                       lp_corner_volume, make_report)
from .train import (TrainConfig, TrainResult, TrainingDiverged,
                    empirical_risk, train)

__all__ = [
    "BACKEND", "DataGenSpec", "Dataset", "NoiseSpec", "sample",
    "true_function", "LossSpec", "check_loss_spec", "loss", "loss_grad",
    "make_loss", "DualGradient", "Network", "NetworkShape", "backward",
    "forward", "init_params", "load_network", "save_network",
    "AscentDiverged", "PerturbationSpec", "grid_maximize", "inner_maximize",
    "project", "ExactPreprocessor", "KnnPreprocessor", "evaluate", "fit_knn",
    "RateFit", "RiskReport", "adversarial_norm_sq", "estimate_lp_risk",
    "estimate_sup_risk", "fit_rate", "lp_corner_volume", "make_report",
    "TrainConfig", "TrainResult", "TrainingDiverged", "empirical_risk",
    "train",
]
