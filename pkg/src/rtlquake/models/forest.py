"""Random forest: bagged CART trees with per-split feature subsampling."""

from __future__ import annotations

import numpy as np

from .base import BaseEstimator, BinaryClassifierMixin, resolve_class_weight
from .tree import grow_tree


class RandomForest(BaseEstimator, BinaryClassifierMixin):
    """Average of CART trees grown on bootstrap resamples.

    Each tree gets its own generator spawned from SeedSequence(seed), in
    tree order; a tree's stream draws its bootstrap indices first, then
    the per-node feature subsets. predict_proba averages leaf class-1
    fractions. With n_trees=1, bootstrap=False, max_features=None the
    forest is exactly a single unrandomized tree.
    """

    def __init__(
        self,
        n_trees: int = 200,
        max_depth: int = 8,
        min_samples_leaf: int = 5,
        max_features="sqrt",
        bootstrap: bool = True,
        class_weight=None,
        seed: int = 0,
        decision_threshold: float = 0.5,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.class_weight = class_weight
        self.seed = seed
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        n = len(y)
        target = y.astype(np.float64)
        pos_w = resolve_class_weight(self.class_weight, y)
        weights = np.where(y == 1, pos_w, 1.0)
        self.trees_ = []
        for seq in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(seq)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            self.trees_.append(
                grow_tree(
                    X[rows],
                    target[rows],
                    weights[rows],
                    criterion="gini",
                    max_depth=self.max_depth,
                    min_samples_leaf=self.min_samples_leaf,
                    max_features=self.max_features,
                    rng=rng,
                )
            )
        return self

    def _positive_proba(self, X):
        acc = np.zeros(X.shape[0])
        for tree in self.trees_:
            acc += tree.predict(X)
        return acc / len(self.trees_)
