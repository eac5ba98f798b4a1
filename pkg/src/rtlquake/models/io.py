"""Versioned JSON serialization for fitted models.

Layout: {"format": "rtlquake-model", "version": 1, "kind": ..., "params":
init parameters, "state": fitted state with trees as nested node records}.
Floats survive the JSON round trip exactly, so reloaded models predict
identically.
"""

from __future__ import annotations

import json

import numpy as np

from .boosting import AdaBoost, GradientBoosting
from .forest import RandomForest
from .linear import LogisticRegression
from .major_rtl import MajorRtl
from .tree import DecisionTree, _Tree

FORMAT_NAME = "rtlquake-model"
FORMAT_VERSION = 1

MODEL_KINDS = {
    "major_rtl": MajorRtl,
    "logreg": LogisticRegression,
    "tree": DecisionTree,
    "random_forest": RandomForest,
    "adaboost": AdaBoost,
    "gradient_boosting": GradientBoosting,
}
_KIND_OF = {cls: kind for kind, cls in MODEL_KINDS.items()}


def model_kind(model) -> str:
    return _KIND_OF[type(model)]


def _state_of(model) -> dict:
    if isinstance(model, MajorRtl):
        return {
            "threshold": model.threshold_,
            "polarity": model.polarity_,
            "scale": model.scale_,
        }
    if isinstance(model, LogisticRegression):
        return {"theta": model.theta_.tolist(), "b": model.b_, "n_iter": model.n_iter_}
    if isinstance(model, DecisionTree):
        return {"tree": model.tree_.to_dict()}
    if isinstance(model, RandomForest):
        return {"trees": [t.to_dict() for t in model.trees_]}
    if isinstance(model, AdaBoost):
        return {"alphas": list(model.alphas_), "stumps": [s.to_dict() for s in model.stumps_]}
    if isinstance(model, GradientBoosting):
        return {"f0": model.f0_, "trees": [t.to_dict() for t in model.trees_]}
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def _restore_state(model, state: dict) -> None:
    if isinstance(model, MajorRtl):
        model.threshold_ = state["threshold"]
        model.polarity_ = state["polarity"]
        model.scale_ = state["scale"]
    elif isinstance(model, LogisticRegression):
        model.theta_ = np.asarray(state["theta"], dtype=np.float64)
        model.b_ = state["b"]
        model.n_iter_ = state["n_iter"]
    elif isinstance(model, DecisionTree):
        model.tree_ = _Tree.from_dict(state["tree"])
    elif isinstance(model, RandomForest):
        model.trees_ = [_Tree.from_dict(t) for t in state["trees"]]
    elif isinstance(model, AdaBoost):
        model.alphas_ = list(state["alphas"])
        model.stumps_ = [_Tree.from_dict(s) for s in state["stumps"]]
    elif isinstance(model, GradientBoosting):
        model.f0_ = state["f0"]
        model.trees_ = [_Tree.from_dict(t) for t in state["trees"]]
    else:
        raise TypeError(f"cannot restore model of type {type(model).__name__}")


def save_model(model, path: str) -> None:
    record = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model_kind(model),
        "n_features": int(model.n_features_in_),
        "params": model.get_params(),
        "state": _state_of(model),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=1)
        fh.write("\n")


def load_model(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        record = json.load(fh)
    if record.get("format") != FORMAT_NAME:
        raise ValueError(f"{path}: not a {FORMAT_NAME} file")
    if record.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {record.get('version')}")
    kind = record["kind"]
    if kind not in MODEL_KINDS:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    model = MODEL_KINDS[kind](**record["params"])
    model.classes_ = np.array([0, 1], dtype=np.int64)
    model.n_features_in_ = record["n_features"]
    _restore_state(model, record["state"])
    return model
