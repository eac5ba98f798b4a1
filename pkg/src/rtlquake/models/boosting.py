"""Boosting ensembles: discrete AdaBoost over stumps and logistic-loss
gradient boosting with Newton-step leaf values.
"""

from __future__ import annotations

import math

import numpy as np

from .base import BaseEstimator, BinaryClassifierMixin, resolve_class_weight, sigmoid
from .tree import grow_tree

_EPS = 1e-10


class AdaBoost(BaseEstimator, BinaryClassifierMixin):
    """Discrete AdaBoost with weighted-Gini CART stumps.

    Round m fits a stump on the current weights, computes the weighted
    error e_m and stage weight alpha_m = 0.5*ln((1-e_m)/e_m), rescales
    sample weights by exp(+-alpha_m) and renormalizes. Boosting stops
    early when e_m >= 0.5 (stump discarded) or e_m == 0 (stump kept with
    e clamped to 1e-10). The score is sum(alpha_m * h_m(x)) with h in
    {-1, +1}; probability = sigmoid(2 * score), uncalibrated.
    """

    def __init__(
        self,
        n_rounds: int = 100,
        base_depth: int = 1,
        min_samples_leaf: int = 1,
        decision_threshold: float = 0.5,
    ):
        self.n_rounds = n_rounds
        self.base_depth = base_depth
        self.min_samples_leaf = min_samples_leaf
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        n = len(y)
        y_pm = np.where(y == 1, 1.0, -1.0)
        w = np.full(n, 1.0 / n)
        presorted = np.argsort(X, axis=0, kind="stable")
        self.stumps_ = []
        self.alphas_ = []
        self.round_errors_ = []
        for _ in range(self.n_rounds):
            stump = grow_tree(
                X,
                y.astype(np.float64),
                w,
                criterion="gini",
                max_depth=self.base_depth,
                min_samples_leaf=self.min_samples_leaf,
                presorted=presorted,
            )
            h_pm = np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
            err = float(w[h_pm != y_pm].sum())
            if err >= 0.5:
                break
            alpha = 0.5 * math.log((1.0 - err) / max(err, _EPS))
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            self.round_errors_.append(err)
            if err == 0.0:
                break
            w = w * np.exp(-alpha * y_pm * h_pm)
            w /= w.sum()
        return self

    def decision_function(self, X):
        X = self._validate_predict(X)
        score = np.zeros(X.shape[0])
        for alpha, stump in zip(self.alphas_, self.stumps_):
            score += alpha * np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
        return score

    def _positive_proba(self, X):
        score = np.zeros(X.shape[0])
        for alpha, stump in zip(self.alphas_, self.stumps_):
            score += alpha * np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
        return sigmoid(2.0 * score)


class GradientBoosting(BaseEstimator, BinaryClassifierMixin):
    """Logistic-loss boosting of regression CARTs.

    F_0 = log(p/(1-p)) for the (weighted) base rate p. Each round fits a
    variance-reduction CART to the weighted residuals a_i*(y_i - p_i),
    replaces every leaf value with one Newton step
    sum(a*(y-p)) / sum(a*p*(1-p)) over the leaf's rows, and updates
    F += learning_rate * tree. a_i is the positive-class weight from
    class_weight (1 for negatives). Probability = sigmoid(F).

    train_loss_path_[k] records the (weighted) mean log-loss after k
    rounds, starting at the prior; with subsample=1.0 and a small
    learning rate the path is non-increasing.
    """

    def __init__(
        self,
        n_trees: int = 200,
        learning_rate: float = 0.1,
        max_depth: int = 3,
        min_samples_leaf: int = 5,
        subsample: float = 1.0,
        class_weight=None,
        seed: int = 0,
        decision_threshold: float = 0.5,
    ):
        self.n_trees = n_trees
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.subsample = subsample
        self.class_weight = class_weight
        self.seed = seed
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.n_trees < 0:
            raise ValueError("n_trees must be >= 0")
        n = len(y)
        yf = y.astype(np.float64)
        a = np.where(y == 1, resolve_class_weight(self.class_weight, y), 1.0)
        p_base = float(np.clip(np.dot(a, yf) / a.sum(), 1e-12, 1.0 - 1e-12))
        self.f0_ = math.log(p_base / (1.0 - p_base))
        rng = np.random.default_rng(self.seed)

        f = np.full(n, self.f0_)
        presorted = np.argsort(X, axis=0, kind="stable")
        self.trees_ = []
        losses = [self._loss(f, yf, a)]
        for _ in range(self.n_trees):
            p = sigmoid(f)
            residual = a * (yf - p)
            hess = a * p * (1.0 - p)
            if self.subsample < 1.0:
                rows = rng.choice(n, size=max(1, int(round(self.subsample * n))), replace=False)
                rows.sort()
                tree = grow_tree(
                    X[rows],
                    residual[rows],
                    np.ones(len(rows)),
                    criterion="mse",
                    max_depth=self.max_depth,
                    min_samples_leaf=self.min_samples_leaf,
                )
            else:
                rows = np.arange(n)
                tree = grow_tree(
                    X,
                    residual,
                    np.ones(n),
                    criterion="mse",
                    max_depth=self.max_depth,
                    min_samples_leaf=self.min_samples_leaf,
                    presorted=presorted,
                )
            # one Newton step per leaf, over the rows the tree was fit on
            leaf_of = tree.apply(X[rows])
            num = np.bincount(leaf_of, weights=residual[rows], minlength=len(tree.value))
            den = np.bincount(leaf_of, weights=hess[rows], minlength=len(tree.value))
            for node in range(len(tree.value)):
                if tree.feature[node] < 0:
                    tree.value[node] = float(num[node] / max(den[node], _EPS))
            self.trees_.append(tree)
            f = f + self.learning_rate * tree.predict(X)
            losses.append(self._loss(f, yf, a))
        self.train_loss_path_ = losses
        return self

    @staticmethod
    def _loss(f, yf, a):
        per_sample = np.maximum(f, 0.0) - yf * f + np.log1p(np.exp(-np.abs(f)))
        return float(np.dot(a, per_sample) / a.sum())

    def decision_function(self, X):
        X = self._validate_predict(X)
        return self._raw_score(X)

    def _raw_score(self, X):
        f = np.full(X.shape[0], self.f0_)
        for tree in self.trees_:
            f += self.learning_rate * tree.predict(X)
        return f

    def staged_decision_function(self, X):
        """Yield the raw score after 0, 1, ..., n_trees rounds."""
        X = self._validate_predict(X)
        f = np.full(X.shape[0], self.f0_)
        yield f.copy()
        for tree in self.trees_:
            f = f + self.learning_rate * tree.predict(X)
            yield f.copy()

    def _positive_proba(self, X):
        return sigmoid(self._raw_score(X))
