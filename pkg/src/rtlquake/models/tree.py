"""CART trees: greedy binary splits over (feature, midpoint) candidates.

Classification splits minimize weighted Gini impurity, regression splits
minimize weighted squared error. Ties break toward the lowest feature
index, then the smallest threshold. Rows with value <= threshold go left.
"""

from __future__ import annotations

import math

import numpy as np

from .base import BaseEstimator, BinaryClassifierMixin, resolve_class_weight


class _Tree:
    """Flat-array binary tree; feature -1 marks a leaf."""

    __slots__ = ("feature", "threshold", "left", "right", "value", "n_node")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.n_node: list[int] = []

    def _add(self, feature=-1, threshold=0.0, value=0.0, n=0) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        self.n_node.append(n)
        return len(self.feature) - 1

    @property
    def n_leaves(self) -> int:
        return sum(1 for f in self.feature if f < 0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index for every row (iterative, vectorized per node)."""
        n = X.shape[0]
        out = np.zeros(n, dtype=np.int64)
        stack = [(0, np.arange(n))]
        while stack:
            node, rows = stack.pop()
            if self.feature[node] < 0:
                out[rows] = node
                continue
            go_left = X[rows, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], rows[go_left]))
            stack.append((self.right[node], rows[~go_left]))
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        values = np.asarray(self.value, dtype=np.float64)
        return values[self.apply(X)]

    def to_dict(self, node: int = 0) -> dict:
        if self.feature[node] < 0:
            return {"value": self.value[node], "n": self.n_node[node]}
        return {
            "feature": self.feature[node],
            "threshold": self.threshold[node],
            "n": self.n_node[node],
            "left": self.to_dict(self.left[node]),
            "right": self.to_dict(self.right[node]),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "_Tree":
        tree = cls()

        def build(rec):
            if "feature" not in rec:
                return tree._add(value=rec["value"], n=rec["n"])
            node = tree._add(feature=rec["feature"], threshold=rec["threshold"], n=rec["n"])
            tree.left[node] = build(rec["left"])
            tree.right[node] = build(rec["right"])
            return node

        build(record)
        return tree


def _best_split(X, target, w, mask, presorted, feat_ids, min_samples_leaf, criterion):
    """Best (feature, threshold, score); None when no valid split exists.

    Node rows arrive as a boolean mask compacted against each feature's
    presorted order (sorted once per fit, not per node). Scores: 'gini'
    -> weighted Gini of the two children over total weight; 'mse' ->
    total weighted squared error of the two children. The first strictly
    better candidate wins, which realizes the tie-break order (lowest
    feature index, then smallest threshold).
    """
    best_score = math.inf
    best = None
    for f in feat_ids:
        order = presorted[:, f]
        sel = order[mask[order]]
        xv = X[sel, f]
        n = len(xv)
        if xv[0] == xv[-1]:
            continue
        wv = w[sel]
        tv = target[sel]
        cut = np.nonzero(xv[:-1] != xv[1:])[0]  # split after position cut[j]
        n_left = cut + 1
        cut = cut[(n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)]
        if len(cut) == 0:
            continue
        cw = np.cumsum(wv)
        cwt = np.cumsum(wv * tv)
        wl = cw[cut]
        wr = cw[-1] - wl
        sl = cwt[cut]
        sr = cwt[-1] - sl
        if criterion == "gini":
            pl = sl / wl
            pr = sr / wr
            score = (wl * 2.0 * pl * (1.0 - pl) + wr * 2.0 * pr * (1.0 - pr)) / cw[-1]
        else:
            cwt2 = np.cumsum(wv * tv * tv)
            sl2 = cwt2[cut]
            sr2 = cwt2[-1] - sl2
            score = (sl2 - sl * sl / wl) + (sr2 - sr * sr / wr)
        k = int(np.argmin(score))  # first minimum -> smallest threshold
        if score[k] < best_score:
            pos = cut[k]
            best_score = float(score[k])
            best = (f, 0.5 * (xv[pos] + xv[pos + 1]), best_score)
    return best


def grow_tree(
    X: np.ndarray,
    target: np.ndarray,
    sample_weight: np.ndarray,
    *,
    criterion: str,
    max_depth: int,
    min_samples_leaf: int,
    max_features=None,
    rng: np.random.Generator | None = None,
    presorted: np.ndarray | None = None,
) -> _Tree:
    """Greedy recursive partitioning; nodes are grown in preorder.

    Columns are argsorted once up front (or passed in via `presorted`,
    which boosting reuses across rounds); each node compacts the sorted
    order with its row mask, keeping split search linear per node.
    With max_features set, each node draws a sorted random feature subset
    before its split search (one draw per node, preorder), so a fixed rng
    makes the tree deterministic.
    """
    n, d = X.shape
    if max_features is None:
        n_sub = d
    elif max_features == "sqrt":
        n_sub = max(1, int(math.sqrt(d)))
    else:
        n_sub = max(1, min(int(max_features), d))
    if presorted is None:
        presorted = np.argsort(X, axis=0, kind="stable")

    tree = _Tree()

    def leaf_value(rows):
        w = sample_weight[rows]
        return float(np.dot(w, target[rows]) / w.sum())

    def grow(rows, depth):
        t = target[rows]
        pure = t.max() == t.min()
        if pure or depth >= max_depth or len(rows) < 2 * min_samples_leaf:
            return tree._add(value=leaf_value(rows), n=len(rows))
        if n_sub < d:
            feat_ids = np.sort(rng.choice(d, size=n_sub, replace=False))
        else:
            feat_ids = range(d)
        mask = np.zeros(n, dtype=bool)
        mask[rows] = True
        split = _best_split(
            X, target, sample_weight, mask, presorted, feat_ids, min_samples_leaf, criterion
        )
        if split is None:
            return tree._add(value=leaf_value(rows), n=len(rows))
        f, thr, _ = split
        node = tree._add(feature=int(f), threshold=float(thr), n=len(rows))
        go_left = X[rows, f] <= thr
        left = grow(rows[go_left], depth + 1)
        right = grow(rows[~go_left], depth + 1)
        tree.left[node] = left
        tree.right[node] = right
        return node

    grow(np.arange(n), 0)
    return tree


class DecisionTree(BaseEstimator, BinaryClassifierMixin):
    """Single CART classifier; leaves predict the class-1 fraction."""

    def __init__(
        self,
        max_depth: int = 8,
        min_samples_leaf: int = 5,
        max_features=None,
        class_weight=None,
        seed: int = 0,
        decision_threshold: float = 0.5,
    ):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.class_weight = class_weight
        self.seed = seed
        self.decision_threshold = decision_threshold

    def fit(self, X, y, sample_weight=None):
        X, y = self._validate_fit(X, y)
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
        w = w * np.where(y == 1, resolve_class_weight(self.class_weight, y), 1.0)
        self.tree_ = grow_tree(
            X,
            y.astype(np.float64),
            w,
            criterion="gini",
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            max_features=self.max_features,
            rng=np.random.default_rng(self.seed),
        )
        return self

    def _positive_proba(self, X):
        return self.tree_.predict(X)
