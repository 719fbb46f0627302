"""Four in-repo learner families behind one train/score surface:
logistic regression (limited-memory quasi-Newton), multilayer perceptron
(Adam), bagged decision trees, and gradient-boosted trees with level-wise
or leaf-wise growth and positive-class weighting."""

from .common import load_model, predict_proba, save_model, sigmoid
from .forest import ForestConfig, train_forest
from .gbdt import GbdtConfig, train_gbdt
from .linear import ConvergenceError, LinearModel, LogisticConfig, train_logistic
from .mlp import MlpConfig, MlpModel, train_mlp
from .splitting import SplitDecision, find_best_split
from .trees import Tree, TreeEnsemble

__all__ = [
    "load_model",
    "predict_proba",
    "save_model",
    "sigmoid",
    "ForestConfig",
    "train_forest",
    "GbdtConfig",
    "train_gbdt",
    "ConvergenceError",
    "LinearModel",
    "LogisticConfig",
    "train_logistic",
    "MlpConfig",
    "MlpModel",
    "train_mlp",
    "SplitDecision",
    "find_best_split",
    "Tree",
    "TreeEnsemble",
]
