"""Estimator-style front end over the propagation pipeline.

RankPropagation bundles graph construction, regularizer assembly, and the
label-propagation solve behind the usual fit/predict surface so it can sit
in pipelines and grid searches. It is transductive: fit takes the full
feature matrix with NaN marking unlabeled entries of y, and predictions
are the propagated values for those same items.
"""
import numpy as np
from sklearn.base import BaseEstimator

from .active_dense import init_covariance, observe_label, suggest
from .errors import ValidationError
from .labels import LabelAssignment
from .metrics import kendall_tau
from .neighbors import build_knn
from .propagation import SolverConfig, order_items, solve
from .regularizer import ManifoldConfig, build_graph_laplacian, build_regularizer
from .validation import check_features


class RankPropagation(BaseEstimator):
    """Propagate sparse rank labels in [-1, 1] over a feature manifold.

    Parameters mirror the pipeline knobs: neighbor count k, local model
    dimension m, local model noise and trend_scale, propagation weight
    lam, and the regularizer kind ("local-model" or "laplacian", the
    latter mainly for degeneracy comparisons).
    """

    def __init__(self, k=20, m=10, lam=1e-6, noise=1e-2, trend_scale=2.0,
                 regularizer="local-model"):
        self.k = k
        self.m = m
        self.lam = lam
        self.noise = noise
        self.trend_scale = trend_scale
        self.regularizer = regularizer

    def fit(self, X, y):
        """X: (u, d) features; y: (u,) values in [-1, 1], NaN = unlabeled."""
        X = check_features(X)
        y = np.asarray(y, dtype=np.float64).ravel()
        if y.shape[0] != X.shape[0]:
            raise ValidationError("X and y lengths differ")
        indicator = ~np.isnan(y)
        if indicator.sum() < 1:
            raise ValidationError("need at least one labeled item")
        labels = LabelAssignment(np.where(indicator, y, 0.0), indicator)
        graph = build_knn(X, self.k)
        if self.regularizer == "laplacian":
            reg = build_graph_laplacian(X, graph)
        elif self.regularizer == "local-model":
            cfg = ManifoldConfig(k=self.k, m=self.m, noise=self.noise,
                                 trend_scale=self.trend_scale)
            reg = build_regularizer(X, graph, cfg)
        else:
            raise ValidationError(f"unknown regularizer {self.regularizer!r}")
        crit = solve(reg, labels, SolverConfig(lam=self.lam))
        self.graph_ = graph
        self.regularizer_ = reg
        self.labels_ = labels
        self.f_ = crit.f[0]
        self.ordering_ = crit.ordering[0]
        return self

    def predict(self, X=None):
        """Propagated values for the fitted items (transductive)."""
        self._check_fitted()
        if X is not None and np.asarray(X).shape[0] != self.f_.shape[0]:
            raise ValidationError(
                "transductive model: predict covers the fitted items")
        return self.f_.copy()

    def transform(self, X=None):
        return self.predict(X)[:, None]

    def score(self, X=None, y=None):
        """Kendall tau between the propagated and the given ordering."""
        self._check_fitted()
        if y is None:
            raise ValidationError("score needs reference values")
        y = np.asarray(y, dtype=np.float64).ravel()
        return kendall_tau(self.ordering_, order_items(y))

    def suggest_labels(self, n=5, pool_size=1000, rng_seed=0):
        """Top-n items to label next, by information gain."""
        self._check_fitted()
        state = init_covariance(self.regularizer_, self.lam)
        for i in self.labels_.labeled_indices:
            observe_label(state, int(i))
        return suggest(state, pool_size=pool_size, n=n, rng_seed=rng_seed)

    def _check_fitted(self):
        if not hasattr(self, "f_"):
            raise ValidationError("estimator is not fitted")
