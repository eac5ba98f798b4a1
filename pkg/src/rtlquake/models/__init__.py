from .boosting import AdaBoost, GradientBoosting
from .forest import RandomForest
from .io import MODEL_KINDS, load_model, model_kind, save_model
from .linear import LogisticRegression, logreg_gradient, logreg_loss
from .major_rtl import MajorRtl
from .tree import DecisionTree

__all__ = [
    "AdaBoost",
    "DecisionTree",
    "GradientBoosting",
    "LogisticRegression",
    "MajorRtl",
    "MODEL_KINDS",
    "RandomForest",
    "load_model",
    "logreg_gradient",
    "logreg_loss",
    "model_kind",
    "save_model",
]
