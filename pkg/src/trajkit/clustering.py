"""Distance-matrix construction and clustering over precomputed distances.

One representative algorithm per clustering family: DBSCAN (density-based),
agglomerative merging with single/complete/average linkage (hierarchical),
and PAM k-medoids (partition-based). All three consume a
:class:`DistanceMatrix`, so any metric that produces one plugs into any of
them. Matrix construction can fan out over worker processes; the result is
bit-identical regardless of the worker count because every pair is evaluated
by the same pure function.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParameter,
    MetricPairError,
    TooFewClusters,
    TrajkitError,
)
from .model import ContextSchema, EnrichedTrajectory, Trajectory
from .similarity import (
    MATRIX_METRICS,
    SimilarityConfig,
    _composite_from_spatial,
    infer_schema,
    spatial_distance,
)

NOISE = -1

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal, plus element ids."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        if len(set(ids)) != len(ids):
            raise InvalidParameter("distance matrix ids must be unique")
        values = np.array(self.values, dtype=float)
        n = len(ids)
        if values.shape != (n, n):
            raise InvalidParameter(
                f"expected a ({n}, {n}) matrix for {n} ids, got {values.shape}"
            )
        if not np.isfinite(values).all():
            raise InvalidParameter("distance matrix entries must be finite")
        if (values < 0).any():
            raise InvalidParameter("distance matrix entries must be >= 0")
        if (np.diag(values) != 0).any():
            raise InvalidParameter("distance matrix diagonal must be zero")
        if not np.array_equal(values, values.T):
            raise InvalidParameter("distance matrix must be symmetric")
        values.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.ids)

    def __len__(self) -> int:
        return len(self.ids)


def as_distance_matrix(obj, ids=None) -> DistanceMatrix:
    """Coerce a DistanceMatrix or square array into a :class:`DistanceMatrix`."""
    if isinstance(obj, DistanceMatrix):
        return obj
    values = np.asarray(obj, dtype=float)
    if ids is None:
        ids = tuple(str(i) for i in range(len(values)))
    return DistanceMatrix(tuple(ids), values)


@dataclass(frozen=True)
class ClusterResult:
    """Flat clustering: one integer label per element, -1 marking noise."""

    ids: tuple[str, ...]
    labels: tuple[int, ...]
    k: int
    algorithm: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.ids) != len(self.labels):
            raise InvalidParameter("one label per element required")
        object.__setattr__(self, "labels", tuple(int(l) for l in self.labels))

    @property
    def noise_count(self) -> int:
        return sum(1 for l in self.labels if l == NOISE)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for l in self.labels:
            if l != NOISE:
                counts[l] += 1
        return counts


# ---------------------------------------------------------------------------
# pairwise distance matrices


_WORKER_STATE: dict = {}


def _init_worker(dataset, metric, cfg, schema, spatial_values):
    _WORKER_STATE["dataset"] = dataset
    _WORKER_STATE["metric"] = metric
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["schema"] = schema
    _WORKER_STATE["spatial"] = spatial_values


def _pair_value(dataset, metric, cfg, schema, spatial, k, i, j):
    e1, e2 = dataset[i], dataset[j]
    try:
        if metric == "composite":
            score = _composite_from_spatial(e1, e2, cfg, float(spatial[k]), schema)
            return (
                1.0 - score.total,
                score.spatial,
                score.temporal,
                score.contextual,
                score.semantic,
                score.continuity,
            )
        return (spatial_distance(e1, e2, cfg),)
    except TrajkitError as exc:
        raise MetricPairError(e1.id, e2.id, exc) from exc


def _eval_range(bounds):
    start, stop = bounds
    dataset = _WORKER_STATE["dataset"]
    metric = _WORKER_STATE["metric"]
    cfg = _WORKER_STATE["cfg"]
    schema = _WORKER_STATE["schema"]
    spatial = _WORKER_STATE["spatial"]
    rows, cols = np.triu_indices(len(dataset), 1)
    out = [
        _pair_value(dataset, metric, cfg, schema, spatial, k, int(rows[k]), int(cols[k]))
        for k in range(start, stop)
    ]
    if not out:
        return np.zeros((0, 1))
    return np.asarray(out, dtype=float)


def _pairwise(dataset, metric, cfg, schema, jobs, spatial_values=None) -> np.ndarray:
    """Evaluate all upper-triangle pairs, optionally across worker processes.

    Returns an (m, c) array in canonical row-major pair order. The values do
    not depend on ``jobs``: every pair is computed by the same pure function.
    """
    n = len(dataset)
    m = n * (n - 1) // 2
    jobs = _resolve_jobs(jobs)
    _init_worker(dataset, metric, cfg, schema, spatial_values)
    if jobs == 1 or m < 64:
        return _eval_range((0, m))
    step = max(1, math.ceil(m / (jobs * 8)))
    bounds = [(s, min(s + step, m)) for s in range(0, m, step)]
    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_init_worker,
        initargs=(dataset, metric, cfg, schema, spatial_values),
    ) as pool:
        chunks = list(pool.map(_eval_range, bounds))
    return np.concatenate(chunks, axis=0)


def _resolve_jobs(jobs) -> int:
    if jobs is None:
        return os.cpu_count() or 1
    jobs = int(jobs)
    if jobs < 1:
        raise InvalidParameter("jobs must be >= 1")
    return jobs


def _as_enriched(dataset) -> list[EnrichedTrajectory]:
    out = []
    for item in dataset:
        if isinstance(item, EnrichedTrajectory):
            out.append(item)
        elif isinstance(item, Trajectory):
            out.append(EnrichedTrajectory(item))
        else:
            raise InvalidParameter("dataset items must be trajectories")
    ids = [e.id for e in out]
    if len(set(ids)) != len(ids):
        raise InvalidParameter("dataset ids must be unique")
    return out


def _square(n: int, flat: np.ndarray) -> np.ndarray:
    values = np.zeros((n, n))
    rows, cols = np.triu_indices(n, 1)
    values[rows, cols] = flat
    values[cols, rows] = flat
    return values


def distance_matrix(
    dataset,
    metric: str = "dtw",
    cfg: SimilarityConfig | None = None,
    jobs: int | None = 1,
    schema: ContextSchema | None = None,
) -> DistanceMatrix:
    """Full symmetric pairwise distance matrix for a trajectory dataset.

    ``metric`` is one of ``euclidean_lockstep``, ``frechet``, ``dtw``,
    ``lcss``, ``edr`` (distance = 1 - similarity for lcss), or ``composite``
    (distance = 1 - composite similarity, resolving an unset sigma to the
    median pairwise spatial distance first).
    """
    matrix, _ = _distance_matrix_full(dataset, metric, cfg, jobs, schema)
    return matrix


def composite_distance_matrix(
    dataset,
    cfg: SimilarityConfig | None = None,
    jobs: int | None = 1,
    schema: ContextSchema | None = None,
):
    """Composite-metric matrix plus per-dimension similarity summaries.

    The summary maps each dimension name to (mean, min, max) over all pairs.
    """
    return _distance_matrix_full(dataset, "composite", cfg, jobs, schema)


def _distance_matrix_full(dataset, metric, cfg, jobs, schema):
    dataset = _as_enriched(dataset)
    if len(dataset) < 2:
        raise InvalidParameter("a distance matrix needs at least 2 trajectories")
    if metric not in MATRIX_METRICS:
        raise InvalidParameter(f"unknown metric {metric!r}; expected one of {MATRIX_METRICS}")
    if cfg is None:
        cfg = SimilarityConfig()
    ids = tuple(e.id for e in dataset)
    n = len(dataset)

    if metric != "composite":
        cfg = SimilarityConfig(
            spatial_metric=metric,
            mode=cfg.mode,
            epsilon=cfg.epsilon,
            delta=cfg.delta,
            sigma=cfg.sigma,
            continuity_blend=cfg.continuity_blend,
        )
        flat = _pairwise(dataset, metric, cfg, schema, jobs)[:, 0]
        return DistanceMatrix(ids, _square(n, flat)), None

    if schema is None:
        # one dataset-level schema so numeric ranges normalize consistently
        schema = infer_schema(*(e.context for e in dataset if e.context is not None))
    spatial_flat = _pairwise(dataset, "__spatial__", cfg, schema, jobs)[:, 0]
    if cfg.sigma is None:
        median = float(np.median(spatial_flat)) if len(spatial_flat) else 0.0
        cfg = cfg.with_sigma(median if median > 0 else 1.0)
    table = _pairwise(dataset, "composite", cfg, schema, jobs, spatial_flat)
    matrix = DistanceMatrix(ids, _square(n, table[:, 0]))
    names = ("spatial", "temporal", "contextual", "semantic", "continuity")
    summary = {"sigma": cfg.sigma}
    for col, name in enumerate(names, start=1):
        summary[name] = {
            "mean": float(table[:, col].mean()),
            "min": float(table[:, col].min()),
            "max": float(table[:, col].max()),
        }
    summary["total"] = {
        "mean": float(1.0 - table[:, 0].mean()),
        "min": float(1.0 - table[:, 0].max()),
        "max": float(1.0 - table[:, 0].min()),
    }
    return matrix, summary


def resolve_sigma(dataset, cfg: SimilarityConfig, jobs: int | None = 1) -> SimilarityConfig:
    """Resolve sigma = median pairwise spatial distance (1.0 if that is 0)."""
    if cfg.sigma is not None:
        return cfg
    dataset = _as_enriched(dataset)
    flat = _pairwise(dataset, "__spatial__", cfg, None, jobs)[:, 0]
    median = float(np.median(flat)) if len(flat) else 0.0
    return cfg.with_sigma(median if median > 0 else 1.0)


# ---------------------------------------------------------------------------
# DBSCAN


def core_mask(values: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Boolean mask of core points: >= min_pts neighbors within eps, self included."""
    return (values <= eps).sum(axis=1) >= min_pts


def dbscan(matrix, eps: float, min_pts: int) -> ClusterResult:
    """Density clustering over precomputed distances.

    Neighborhoods are closed balls (d <= eps) counting the point itself.
    Clusters are the connected components of core points; border points join
    the cluster of their lowest-index core neighbor; the rest is noise.
    """
    matrix = as_distance_matrix(matrix)
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidParameter("eps must be a positive finite number")
    if int(min_pts) != min_pts or min_pts < 1:
        raise InvalidParameter("min_pts must be an integer >= 1")
    values = matrix.values
    n = matrix.n
    within = values <= eps
    core = within.sum(axis=1) >= min_pts
    labels = np.full(n, NOISE, dtype=int)
    cluster = 0
    for i in range(n):
        if not core[i] or labels[i] != NOISE:
            continue
        labels[i] = cluster
        stack = [i]
        while stack:
            u = stack.pop()
            for v in np.nonzero(within[u] & core)[0]:
                if labels[v] == NOISE:
                    labels[v] = cluster
                    stack.append(int(v))
        cluster += 1
    for i in range(n):
        if core[i]:
            continue
        neighbors = np.nonzero(within[i] & core)[0]
        if len(neighbors):
            labels[i] = labels[neighbors[0]]
    return ClusterResult(
        matrix.ids,
        tuple(labels),
        cluster,
        "dbscan",
        {"eps": float(eps), "min_pts": int(min_pts)},
    )


# ---------------------------------------------------------------------------
# agglomerative hierarchy


@dataclass(frozen=True)
class Merge:
    """One agglomerative merge: the two node ids, its height, its member count."""

    left: int
    right: int
    height: float
    count: int


@dataclass(frozen=True)
class Dendrogram:
    """Merge list of an agglomerative run. Leaves are nodes 0..n-1; the merge
    at step s creates node n + s."""

    ids: tuple[str, ...]
    linkage: str
    merges: tuple[Merge, ...]

    @property
    def n_leaves(self) -> int:
        return len(self.ids)

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(m.height for m in self.merges)


def agglomerative(matrix, linkage: str) -> Dendrogram:
    """Repeatedly merge the closest active pair of clusters.

    Ties break on the smallest (row, column) position pair. Cluster-to-
    cluster distances follow the linkage: minimum, maximum, or size-weighted
    average of the member distances.
    """
    matrix = as_distance_matrix(matrix)
    if linkage not in LINKAGES:
        raise InvalidParameter(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    n = matrix.n
    if n < 2:
        raise InvalidParameter("agglomerative clustering needs at least 2 elements")
    # upper-triangle working copy; diagonal, lower triangle, retired rows = inf
    work = matrix.values.astype(float)
    work[np.tril_indices(n)] = np.inf
    node = list(range(n))
    size = [1] * n
    alive = np.ones(n, dtype=bool)
    merges = []
    for step in range(n - 1):
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        height = float(work[i, j])
        merges.append(Merge(node[i], node[j], height, size[i] + size[j]))
        others = np.nonzero(alive)[0]
        others = others[(others != i) & (others != j)]
        if len(others):
            d_i = work[np.minimum(i, others), np.maximum(i, others)]
            d_j = work[np.minimum(j, others), np.maximum(j, others)]
            if linkage == "single":
                combined = np.minimum(d_i, d_j)
            elif linkage == "complete":
                combined = np.maximum(d_i, d_j)
            else:
                combined = (size[i] * d_i + size[j] * d_j) / (size[i] + size[j])
            work[np.minimum(i, others), np.maximum(i, others)] = combined
        work[j, :] = np.inf
        work[:, j] = np.inf
        alive[j] = False
        node[i] = n + step
        size[i] += size[j]
    return Dendrogram(matrix.ids, linkage, tuple(merges))


def cut_dendrogram(
    dendrogram: Dendrogram, k: int | None = None, height: float | None = None
) -> ClusterResult:
    """Flatten a dendrogram into clusters, by target count or by height.

    With ``k``, the last k-1 merges are undone; with ``height``, merges above
    that height are discarded. Cluster ids are assigned by each cluster's
    smallest member index.
    """
    if (k is None) == (height is None):
        raise InvalidParameter("provide exactly one of k or height")
    n = dendrogram.n_leaves
    if k is not None:
        if int(k) != k or not 1 <= k <= n:
            raise InvalidParameter(f"k must be an integer in [1, {n}]")
        applied_steps = range(n - int(k))
    else:
        if not (height >= 0):
            raise InvalidParameter("height must be >= 0")
        applied_steps = [
            s for s, m in enumerate(dendrogram.merges) if m.height <= height
        ]

    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step in applied_steps:
        merge = dendrogram.merges[step]
        new = n + step
        parent[find(merge.left)] = new
        parent[find(merge.right)] = new

    roots: dict[int, int] = {}
    labels = []
    for leaf in range(n):
        root = find(leaf)
        if root not in roots:
            roots[root] = len(roots)
        labels.append(roots[root])
    params: dict = {"linkage": dendrogram.linkage}
    if k is not None:
        params["k"] = int(k)
    else:
        params["height"] = float(height)
    return ClusterResult(
        dendrogram.ids, tuple(labels), len(roots), "agglomerative", params
    )


# ---------------------------------------------------------------------------
# PAM k-medoids


@dataclass(frozen=True)
class KMedoidsResult:
    """Flat clustering plus the chosen medoids and the total distance cost."""

    result: ClusterResult
    medoid_indices: tuple[int, ...]
    medoid_ids: tuple[str, ...]
    cost: float


def _pam_build(values: np.ndarray, k: int) -> list[int]:
    """Greedy BUILD: start at the smallest-total-distance element, then add
    the candidate removing the most residual distance (ties: lowest index)."""
    n = len(values)
    medoids = [int(np.argmin(values.sum(axis=0)))]
    while len(medoids) < k:
        nearest = values[:, medoids].min(axis=1)
        candidates = np.array([c for c in range(n) if c not in medoids])
        gains = np.maximum(nearest[:, None] - values[:, candidates], 0.0).sum(axis=0)
        medoids.append(int(candidates[int(np.argmax(gains))]))
    return sorted(medoids)


def _pam_swap(values: np.ndarray, medoids: list[int]) -> tuple[list[int], float]:
    """Best-improvement SWAP until no single medoid/non-medoid exchange
    lowers the total within-cluster distance (ties: lowest index pair)."""
    n = len(values)

    def total_cost(meds: list[int]) -> float:
        return float(values[:, meds].min(axis=1).sum())

    cost = total_cost(medoids)
    while True:
        best_delta = 0.0
        best_swap = None
        medoid_set = set(medoids)
        for m in medoids:
            for h in range(n):
                if h in medoid_set:
                    continue
                trial = sorted(x for x in medoids if x != m) + [h]
                trial.sort()
                delta = total_cost(trial) - cost
                if delta < best_delta:
                    best_delta = delta
                    best_swap = trial
        if best_swap is None:
            return medoids, cost
        medoids = best_swap
        cost = total_cost(medoids)


def k_medoids(matrix, k: int, seed: int = 0, restarts: int = 10) -> KMedoidsResult:
    """PAM: greedy BUILD initialization refined by best-improvement SWAP until
    no single medoid/non-medoid exchange lowers the total distance.

    SWAP alone only guarantees a 1-swap local optimum, so the search is
    additionally restarted from ``restarts`` seeded random medoid sets and
    the cheapest converged solution wins (ties keep the earliest start, with
    the BUILD start first). The outcome is deterministic given ``seed``;
    ``restarts=0`` gives plain BUILD+SWAP.
    """
    matrix = as_distance_matrix(matrix)
    n = matrix.n
    if int(k) != k or not 1 <= k <= n:
        raise InvalidParameter(f"k must be an integer in [1, {n}]")
    if int(restarts) != restarts or restarts < 0:
        raise InvalidParameter("restarts must be an integer >= 0")
    k = int(k)
    values = matrix.values

    starts = [_pam_build(values, k)]
    rng = np.random.default_rng(int(seed))
    for _ in range(int(restarts)):
        starts.append(sorted(int(x) for x in rng.choice(n, size=k, replace=False)))

    medoids: list[int] = []
    cost = math.inf
    for start in starts:
        got, got_cost = _pam_swap(values, list(start))
        if got_cost < cost:
            medoids, cost = got, got_cost

    assignment = np.argmin(values[:, medoids], axis=1)
    labels = tuple(int(a) for a in assignment)
    result = ClusterResult(
        matrix.ids,
        labels,
        k,
        "k_medoids",
        {"k": k, "seed": int(seed), "restarts": int(restarts)},
    )
    medoid_ids = tuple(matrix.ids[m] for m in medoids)
    return KMedoidsResult(result, tuple(medoids), medoid_ids, cost)


# ---------------------------------------------------------------------------
# internal validation


def silhouette(matrix, labels) -> float:
    """Mean silhouette coefficient over non-noise elements.

    Singleton clusters contribute 0; needs at least two non-noise clusters.
    """
    matrix = as_distance_matrix(matrix)
    if isinstance(labels, ClusterResult):
        labels = labels.labels
    labels = np.asarray(labels, dtype=int)
    if len(labels) != matrix.n:
        raise InvalidParameter("one label per matrix element required")
    values = matrix.values
    keep = labels != NOISE
    clusters = sorted(set(labels[keep].tolist()))
    if len(clusters) < 2:
        raise TooFewClusters("silhouette needs at least 2 non-noise clusters")
    members = {c: np.nonzero(labels == c)[0] for c in clusters}
    scores = []
    for i in np.nonzero(keep)[0]:
        own = members[labels[i]]
        if len(own) == 1:
            scores.append(0.0)
            continue
        a = values[i, own[own != i]].mean()
        b = min(values[i, members[c]].mean() for c in clusters if c != labels[i])
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return float(np.mean(scores))
