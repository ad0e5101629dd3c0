"""scikit-learn-style estimator fronts for the toolkit.

These classes follow the sklearn contract — ``__init__`` only stores
parameters, ``fit`` validates and computes, fitted attributes get a trailing
underscore, and ``get_params``/``set_params`` round-trip — so they compose
with pipelines, ``clone``, and grid search without depending on sklearn
itself.
"""

from __future__ import annotations

import inspect

import numpy as np

from . import clustering as _cl
from .errors import InvalidParameter
from .model import EnrichedTrajectory, Trajectory, resample
from .similarity import (
    MATRIX_METRICS,
    SimilarityConfig,
    composite_similarity,
    spatial_distance,
)


class BaseEstimator:
    """Parameter introspection shared by all estimators."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            p.name
            for p in sig.parameters.values()
            if p.name != "self" and p.kind in (p.POSITIONAL_OR_KEYWORD, p.KEYWORD_ONLY)
        ]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


# ---------------------------------------------------------------------------
# input validation helpers


def check_distance_matrix(X) -> _cl.DistanceMatrix:
    """Validate a precomputed distance matrix (square, symmetric, zero diagonal)."""
    return _cl.as_distance_matrix(X)


def check_trajectories(X) -> list[EnrichedTrajectory]:
    """Validate a sequence of trajectories, wrapping bare ones as enriched."""
    return _cl._as_enriched(list(X))


# ---------------------------------------------------------------------------
# transformers


class PairwiseTrajectoryDistance(BaseEstimator):
    """Transformer from trajectories to pairwise distances.

    ``fit_transform(X)`` produces the square matrix of X against itself
    (also stored as ``matrix_``); ``transform(Y)`` produces the rectangular
    matrix of Y against the fitted X.
    """

    def __init__(self, metric: str = "dtw", config: SimilarityConfig | None = None,
                 jobs: int | None = 1):
        self.metric = metric
        self.config = config
        self.jobs = jobs

    def fit(self, X, y=None) -> "PairwiseTrajectoryDistance":
        if self.metric not in MATRIX_METRICS:
            raise InvalidParameter(f"unknown metric {self.metric!r}")
        self.X_fit_ = check_trajectories(X)
        cfg = self.config if self.config is not None else SimilarityConfig()
        if self.metric != "composite":
            cfg = SimilarityConfig(
                spatial_metric=self.metric,
                mode=cfg.mode,
                epsilon=cfg.epsilon,
                delta=cfg.delta,
                sigma=cfg.sigma,
                continuity_blend=cfg.continuity_blend,
            )
        elif cfg.sigma is None:
            cfg = _cl.resolve_sigma(self.X_fit_, cfg, jobs=self.jobs)
        self.config_ = cfg
        return self

    def _pair(self, a: EnrichedTrajectory, b: EnrichedTrajectory) -> float:
        if self.metric == "composite":
            return 1.0 - composite_similarity(a, b, self.config_).total
        return spatial_distance(a, b, self.config_)

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "X_fit_"):
            raise InvalidParameter("transform called before fit")
        rows = check_trajectories(X)
        out = np.empty((len(rows), len(self.X_fit_)))
        for i, a in enumerate(rows):
            for j, b in enumerate(self.X_fit_):
                out[i, j] = self._pair(a, b)
        return out

    def fit_transform(self, X, y=None) -> np.ndarray:
        self.fit(X)
        self.matrix_ = _cl.distance_matrix(
            self.X_fit_, self.metric, self.config_, jobs=self.jobs
        )
        return np.asarray(self.matrix_.values)


class TrajectoryResampler(BaseEstimator):
    """Transformer resampling every trajectory onto ``n_points`` uniform samples."""

    def __init__(self, n_points: int = 50):
        self.n_points = n_points

    def fit(self, X, y=None) -> "TrajectoryResampler":
        return self

    def transform(self, X) -> list[Trajectory]:
        out = []
        for t in X:
            if isinstance(t, EnrichedTrajectory):
                t = t.trajectory
            out.append(resample(t, self.n_points))
        return out

    def fit_transform(self, X, y=None) -> list[Trajectory]:
        return self.fit(X).transform(X)


# ---------------------------------------------------------------------------
# clusterers (fit on a precomputed distance matrix)


class DBSCAN(BaseEstimator):
    """Density clustering over a precomputed distance matrix."""

    def __init__(self, eps: float = 0.5, min_pts: int = 5):
        self.eps = eps
        self.min_pts = min_pts

    def fit(self, X, y=None) -> "DBSCAN":
        matrix = check_distance_matrix(X)
        self.result_ = _cl.dbscan(matrix, self.eps, self.min_pts)
        self.labels_ = np.asarray(self.result_.labels)
        self.n_clusters_ = self.result_.k
        self.core_sample_indices_ = np.nonzero(
            _cl.core_mask(matrix.values, self.eps, self.min_pts)
        )[0]
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_


class AgglomerativeClustering(BaseEstimator):
    """Hierarchical merging over a precomputed distance matrix.

    Give ``n_clusters`` or ``height`` to obtain flat labels; either way the
    full merge tree is kept as ``dendrogram_``/``merges_``.
    """

    def __init__(self, linkage: str = "average", n_clusters: int | None = 2,
                 height: float | None = None):
        self.linkage = linkage
        self.n_clusters = n_clusters
        self.height = height

    def fit(self, X, y=None) -> "AgglomerativeClustering":
        matrix = check_distance_matrix(X)
        self.dendrogram_ = _cl.agglomerative(matrix, self.linkage)
        self.merges_ = np.array(
            [[m.left, m.right, m.height, m.count] for m in self.dendrogram_.merges]
        )
        if self.n_clusters is not None and self.height is not None:
            raise InvalidParameter("give n_clusters or height, not both")
        if self.n_clusters is not None or self.height is not None:
            self.result_ = _cl.cut_dendrogram(
                self.dendrogram_, k=self.n_clusters, height=self.height
            )
            self.labels_ = np.asarray(self.result_.labels)
            self.n_clusters_ = self.result_.k
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        self.fit(X)
        if not hasattr(self, "labels_"):
            raise InvalidParameter("set n_clusters or height to get flat labels")
        return self.labels_


class KMedoids(BaseEstimator):
    """PAM k-medoids over a precomputed distance matrix."""

    def __init__(self, n_clusters: int = 2, seed: int = 0):
        self.n_clusters = n_clusters
        self.seed = seed

    def fit(self, X, y=None) -> "KMedoids":
        matrix = check_distance_matrix(X)
        out = _cl.k_medoids(matrix, self.n_clusters, self.seed)
        self.result_ = out.result
        self.labels_ = np.asarray(out.result.labels)
        self.medoid_indices_ = np.asarray(out.medoid_indices)
        self.inertia_ = out.cost
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_
