"""Logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from .base import BaseEstimator, BinaryClassifierMixin, sigmoid


def logreg_loss(X, y, theta, b, l2: float) -> float:
    """Mean log-loss plus l2 * ||theta||^2 / 2 (intercept unpenalized)."""
    z = X @ theta + b
    # stable softplus(z) - y*z
    per_sample = np.maximum(z, 0.0) - y * z + np.log1p(np.exp(-np.abs(z)))
    return float(per_sample.mean() + 0.5 * l2 * np.dot(theta, theta))


def logreg_gradient(X, y, theta, b, l2: float):
    """(d loss / d theta, d loss / d b) for :func:`logreg_loss`."""
    n = len(y)
    resid = sigmoid(X @ theta + b) - y
    return X.T @ resid / n + l2 * theta, float(resid.mean())


class LogisticRegression(BaseEstimator, BinaryClassifierMixin):
    """Pr(c=1 | x) = sigmoid(theta . x + b), trained by gradient descent.

    Stops after max_iter steps or once the gradient infinity-norm (over
    theta and b jointly) drops below tol. Features should be normalized;
    a non-finite loss during training raises with that advice.
    """

    def __init__(
        self,
        lr: float = 0.1,
        l2: float = 1e-4,
        max_iter: int = 5000,
        tol: float = 1e-6,
        decision_threshold: float = 0.5,
    ):
        self.lr = lr
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        yf = y.astype(np.float64)
        theta = np.zeros(X.shape[1])
        b = 0.0
        n_iter = 0
        for n_iter in range(1, self.max_iter + 1):
            g_theta, g_b = logreg_gradient(X, yf, theta, b, self.l2)
            theta -= self.lr * g_theta
            b -= self.lr * g_b
            loss = logreg_loss(X, yf, theta, b, self.l2)
            if not np.isfinite(loss):
                raise ValueError(
                    "logistic regression training diverged (non-finite loss); "
                    "normalize the features or lower the learning rate"
                )
            if max(np.abs(g_theta).max(initial=0.0), abs(g_b)) < self.tol:
                break
        self.theta_ = theta
        self.b_ = b
        self.n_iter_ = n_iter
        return self

    def _positive_proba(self, X):
        return sigmoid(X @ self.theta_ + self.b_)
