"""Dependent subspaces of paired views found by cross-view neighbor retrieval."""

__version__ = "0.1.0"

from .cca import CcaResult, cca_fit
from .data import FitConfig, LinearMap, MultiViewDataset, split_indices, validate_dataset
from .evaluation import mean_precision_recall, retrieval_curves, table1_protocol
from .exceptions import NrdepError
from .measures import angle_cosine, kl_divergence, sim_inner, symmetrized_kl
from .neighborhood import compute_sigma, neighbor_field, projected_neighbor_field
from .objective import ObjectiveState, init_gamma, objective_sim, penalty_kl, total_objective
from .optimizer import FitResult, fit, init_maps, lbfgs_minimize
from .synthgen import SyntheticSpec, correspondence_score, generate

__all__ = [
    "CcaResult", "FitConfig", "FitResult", "LinearMap", "MultiViewDataset", "NrdepError",
    "ObjectiveState", "SyntheticSpec", "angle_cosine", "cca_fit", "compute_sigma",
    "correspondence_score", "fit", "generate", "init_gamma", "init_maps", "kl_divergence",
    "lbfgs_minimize", "mean_precision_recall", "neighbor_field", "objective_sim",
    "penalty_kl", "projected_neighbor_field", "retrieval_curves", "sim_inner",
    "split_indices", "symmetrized_kl", "table1_protocol", "total_objective",
    "validate_dataset",
]
