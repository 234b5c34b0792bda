"""Gradient-boosted multiclass trees with gamma-penalized exact splits."""

from .ensemble import (
    BoostedEnsemble,
    TrainConfig,
    predict_labels,
    predict_proba,
    raw_scores,
    train,
)
from .objective import gradient_hessian, log_loss, softmax
from .search import expand_grid, grid_search, save_cv_table, stratified_folds
from .tree import RegressionTree, build_tree, leaf_weight, split_gain

__all__ = [
    "BoostedEnsemble",
    "TrainConfig",
    "RegressionTree",
    "train",
    "predict_proba",
    "predict_labels",
    "raw_scores",
    "build_tree",
    "split_gain",
    "leaf_weight",
    "softmax",
    "log_loss",
    "gradient_hessian",
    "expand_grid",
    "grid_search",
    "stratified_folds",
    "save_cv_table",
]
