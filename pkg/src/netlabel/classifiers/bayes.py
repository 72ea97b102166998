"""Multinomial naive Bayes over raw counts with Laplace smoothing."""
from __future__ import annotations

import numpy as np


class MultinomialNB:
    """Two-class multinomial event model, computed in log space.

    Only dimensions with non-zero training mass enter the model; counts on
    other dimensions of a test row are ignored. Ties predict 0.
    """

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        self.dims_ = np.flatnonzero(X.sum(axis=0) > 0)
        Xd = X[:, self.dims_]
        self.classes_ = np.unique(y)
        counts = np.stack([Xd[y == c].sum(axis=0) for c in self.classes_])
        smoothed = counts + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        priors = np.array([(y == c).sum() for c in self.classes_], dtype=float)
        self.class_log_prior_ = np.log(priors / priors.sum())
        return self

    def joint_log_likelihood(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))[:, self.dims_]
        return X @ self.feature_log_prob_.T + self.class_log_prior_

    def predict(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        # argmax picks the first maximum, and classes_ is sorted, so ties land on 0
        return self.classes_[np.argmax(jll, axis=1)].astype(np.int64)
