"""Single-feature threshold classifier over one RTL column.

The classical baseline: pick the threshold (and polarity) on one feature
column that maximizes training F1. Probabilities come from a sigmoid of
the signed, std-scaled distance to the threshold, so both hard labels and
scores are invariant under increasing affine transforms of the column.
"""

from __future__ import annotations

import numpy as np

from .base import BaseEstimator, BinaryClassifierMixin, sigmoid


def _f1_curve(tp, fp, n_pos):
    fn = n_pos - tp
    denom = 2.0 * tp + fp + fn
    return np.where(denom > 0, 2.0 * tp / np.where(denom > 0, denom, 1.0), 0.0)


class MajorRtl(BaseEstimator, BinaryClassifierMixin):
    def __init__(self, feature_index: int = 0, decision_threshold: float = 0.5):
        self.feature_index = feature_index
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        """Scan midpoints of sorted unique values with both polarities.

        Ties break toward the smaller threshold, >= polarity first.
        """
        X, y = self._validate_fit(X, y)
        x = X[:, self.feature_index]
        n_pos = int(y.sum())
        if n_pos == 0 or n_pos == len(y):
            raise ValueError("major-RTL threshold fit requires both classes in training data")

        uniq, inv = np.unique(x, return_inverse=True)
        pos_per_value = np.bincount(inv, weights=y).astype(np.float64)
        tot_per_value = np.bincount(inv).astype(np.float64)
        if len(uniq) < 2:
            self.threshold_ = float(uniq[0])
            self.polarity_ = 1
        else:
            midpoints = 0.5 * (uniq[:-1] + uniq[1:])
            cum_pos = np.cumsum(pos_per_value)  # positives with value <= uniq[k]
            cum_tot = np.cumsum(tot_per_value)
            # rule x >= midpoint[k] predicts 1 for values above uniq[k]
            tp_ge = n_pos - cum_pos[:-1]
            fp_ge = (len(y) - cum_tot[:-1]) - tp_ge
            f1_ge = _f1_curve(tp_ge, fp_ge, n_pos)
            # rule x <= midpoint[k]
            tp_le = cum_pos[:-1]
            fp_le = cum_tot[:-1] - tp_le
            f1_le = _f1_curve(tp_le, fp_le, n_pos)

            best_f1 = -1.0
            best = (float(midpoints[0]), 1)
            for k in range(len(midpoints)):  # ascending thresholds
                for polarity, f1 in ((1, f1_ge[k]), (-1, f1_le[k])):
                    if f1 > best_f1:
                        best_f1 = f1
                        best = (float(midpoints[k]), polarity)
            self.threshold_, self.polarity_ = best
        std = float(np.std(x))
        self.scale_ = std if std > 0 else 1.0
        return self

    def _positive_proba(self, X):
        x = X[:, self.feature_index]
        return sigmoid(self.polarity_ * (x - self.threshold_) / self.scale_)
