"""Shared plumbing for the native binary classifiers.

All estimators follow the scikit-learn protocol (``fit`` returns self,
``get_params``/``set_params`` from ``__init__`` arguments, fitted state in
trailing-underscore attributes) so they compose with the wider ecosystem.
``predict_proba`` returns an (n, 2) column-stacked array; ``predict``
fires class 1 when the positive probability is >= ``decision_threshold``.

Randomness: every stochastic fit draws from ``numpy.random.default_rng``
seeded by the estimator's ``seed`` parameter. Ensembles derive one child
generator per tree from ``numpy.random.SeedSequence(seed).spawn`` in tree
order, so per-tree streams are independent of execution order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


class BinaryClassifierMixin(ClassifierMixin):
    """predict/predict_proba shared by all classifiers in this package."""

    def _validate_fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y)
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be binary {0, 1}")
        y = y.astype(np.int64)
        self.classes_ = np.array([0, 1], dtype=np.int64)
        self.n_features_in_ = X.shape[1]
        return X, y

    def _validate_predict(self, X):
        check_is_fitted(self)
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"feature count mismatch: model fitted on {self.n_features_in_}, got {X.shape[1]}"
            )
        return X

    def predict_proba(self, X):
        X = self._validate_predict(X)
        p = np.clip(self._positive_proba(X), 0.0, 1.0)
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        threshold = getattr(self, "decision_threshold", 0.5)
        return (self.predict_proba(X)[:, 1] >= threshold).astype(np.int64)


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def resolve_class_weight(class_weight, y) -> float:
    """Positive-class weight multiplier: None -> 1, 'balanced' -> n_neg/n_pos."""
    if class_weight is None:
        return 1.0
    if class_weight == "balanced":
        n_pos = int(np.sum(y == 1))
        n_neg = len(y) - n_pos
        if n_pos == 0:
            return 1.0
        return n_neg / n_pos
    w = float(class_weight)
    if w <= 0:
        raise ValueError("class_weight must be positive")
    return w


__all__ = ["BaseEstimator", "BinaryClassifierMixin", "sigmoid", "resolve_class_weight"]
