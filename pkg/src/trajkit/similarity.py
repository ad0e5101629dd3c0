"""Trajectory similarity: the five classical distance metrics, contextual
and semantic similarities, the continuity score, and their weighted
composition over the four trajectory dimensions.

Distance metrics accept :class:`~trajkit.model.Trajectory` objects or raw
``(k, n)`` coordinate arrays. The composite similarity operates on
:class:`~trajkit.model.EnrichedTrajectory` pairs and returns a per-dimension
breakdown together with the weighted total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .distance import EUCLIDEAN, MODES, BaseDistance
from .errors import (
    BothDegenerate,
    DimensionMismatch,
    DimensionUnsupported,
    EmptyMatchSet,
    InvalidConfig,
    InvalidParameter,
    InvalidValue,
    LengthMismatch,
    NoContext,
    NoSharedSchema,
    UnknownKey,
    WeightSimplexViolation,
)
from .model import (
    ContextKeySpec,
    ContextSample,
    ContextSchema,
    EnrichedTrajectory,
    Trajectory,
    interpolate_coords,
    time_span,
)
from .temporal import temporal_overlap_ratio

#: Metric names accepted for the spatial dimension and for distance matrices.
SPATIAL_METRICS = ("euclidean_lockstep", "frechet", "dtw", "lcss", "edr")
MATRIX_METRICS = SPATIAL_METRICS + ("composite",)

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class SimilarityConfig:
    """Knobs of the composite similarity.

    The four dimension weights must be non-negative and sum to one. ``sigma``
    is the distance-to-similarity scale; ``None`` means "resolve from the
    dataset" (median pairwise spatial distance), which
    :func:`trajkit.clustering.distance_matrix` does automatically.
    """

    w_spatial: float = 0.25
    w_temporal: float = 0.25
    w_context: float = 0.25
    w_semantic: float = 0.25
    spatial_metric: str = "dtw"
    mode: str = "euclidean"
    epsilon: float = 1.0
    delta: int | None = None
    sigma: float | None = None
    continuity_blend: float = 0.5

    def __post_init__(self):
        weights = (self.w_spatial, self.w_temporal, self.w_context, self.w_semantic)
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise WeightSimplexViolation(
                f"weights must be >= 0 and sum to 1, got {weights} (sum {sum(weights)})"
            )
        if self.spatial_metric not in SPATIAL_METRICS:
            raise InvalidConfig(f"unknown spatial metric {self.spatial_metric!r}")
        if self.mode not in MODES:
            raise InvalidConfig(f"unknown base distance mode {self.mode!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise InvalidConfig("epsilon must be a positive finite number")
        if self.delta is not None and (int(self.delta) != self.delta or self.delta < 0):
            raise InvalidConfig("delta must be a non-negative integer or None")
        if self.sigma is not None and not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InvalidConfig("sigma must be a positive finite number or None")
        if not 0.0 <= self.continuity_blend <= 1.0:
            raise InvalidConfig("continuity blend must lie in [0, 1]")

    @property
    def base(self) -> BaseDistance:
        return BaseDistance(self.mode)

    def with_sigma(self, sigma: float) -> "SimilarityConfig":
        return replace(self, sigma=float(sigma))


@dataclass(frozen=True)
class MatchSet:
    """Matched index pairs, strictly increasing in both components."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
            if i1 <= i0 or j1 <= j0:
                raise InvalidParameter("match pairs must strictly increase in both indices")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def run_lengths(self) -> tuple[int, ...]:
        """Lengths of maximal runs where both indices advance by exactly 1."""
        runs: list[int] = []
        prev: tuple[int, int] | None = None
        for i, j in self.pairs:
            if prev is not None and i == prev[0] + 1 and j == prev[1] + 1:
                runs[-1] += 1
            else:
                runs.append(1)
            prev = (i, j)
        return tuple(runs)


@dataclass(frozen=True)
class LcssResult:
    length: int
    similarity: float
    matches: MatchSet


@dataclass(frozen=True)
class CompositeScore:
    """Weighted total plus the four dimension scores and the continuity term."""

    total: float
    spatial: float
    temporal: float
    contextual: float
    semantic: float
    continuity: float


# ---------------------------------------------------------------------------
# plumbing


def _as_coords(t) -> np.ndarray:
    if isinstance(t, Trajectory):
        return t.coords
    if isinstance(t, EnrichedTrajectory):
        return t.trajectory.coords
    arr = np.asarray(t, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 1)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(None, "coordinates must form a (points, dims) array")
    if not np.isfinite(arr).all():
        raise InvalidParameter("coordinates must be finite")
    return np.ascontiguousarray(arr)


def _check_pair(a: np.ndarray, b: np.ndarray, base: BaseDistance, require_nonempty=True):
    if require_nonempty and (len(a) == 0 or len(b) == 0):
        raise InvalidParameter("both trajectories must be non-empty")
    if len(a) and len(b) and a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            None, f"spatial dimensions differ: {a.shape[1]} vs {b.shape[1]}"
        )
    if base.mode == "haversine" and len(a) and a.shape[1] != 2:
        raise DimensionUnsupported("haversine mode requires 2-D (lon, lat) coordinates")


def _mode_int(base: BaseDistance) -> int:
    return _kernels.MODE_EUCLIDEAN if base.mode == "euclidean" else _kernels.MODE_HAVERSINE


# ---------------------------------------------------------------------------
# the five distance metrics


def lockstep_euclidean(t1, t2, base: BaseDistance = EUCLIDEAN) -> float:
    """Mean base distance over index-aligned point pairs (equal lengths)."""
    a, b = _as_coords(t1), _as_coords(t2)
    _check_pair(a, b, base)
    if len(a) != len(b):
        raise LengthMismatch(
            f"lock-step comparison needs equal point counts, got {len(a)} and {len(b)}"
        )
    return float(base.aligned(a, b).mean())


def discrete_frechet(t1, t2, base: BaseDistance = EUCLIDEAN) -> float:
    """Discrete Fréchet distance: min over monotone couplings of the max pair distance."""
    a, b = _as_coords(t1), _as_coords(t2)
    _check_pair(a, b, base)
    return float(_kernels.frechet_kernel(a, b, _mode_int(base)))


def dtw(t1, t2, base: BaseDistance = EUCLIDEAN, window: int | None = None) -> float:
    """Dynamic time warping: min over warping paths of the summed pair distances.

    ``window`` optionally bounds |i - j| along the path (Sakoe-Chiba band);
    it must be at least the length difference of the two trajectories.
    """
    a, b = _as_coords(t1), _as_coords(t2)
    _check_pair(a, b, base)
    if window is None:
        w = -1
    else:
        w = int(window)
        if w < 0:
            raise InvalidParameter("window must be >= 0")
        if w < abs(len(a) - len(b)):
            raise InvalidParameter(
                f"window {w} is narrower than the length difference {abs(len(a) - len(b))}"
            )
    return float(_kernels.dtw_kernel(a, b, _mode_int(base), w))


def lcss(
    t1,
    t2,
    epsilon: float,
    delta: int | None = None,
    base: BaseDistance = EUCLIDEAN,
) -> LcssResult:
    """Longest common subsequence under a distance threshold and index window.

    Two points match when their base distance is <= ``epsilon`` and their
    index offset is within ``delta`` (``None`` = unbounded). The similarity
    is the match count over the shorter point count. The witnessing match
    set is the deterministic backtrace preferring match, then advancing the
    first trajectory, then the second.
    """
    if not (epsilon > 0):
        raise InvalidParameter("epsilon must be > 0")
    a, b = _as_coords(t1), _as_coords(t2)
    _check_pair(a, b, base)
    d = -1 if delta is None else int(delta)
    if d != -1 and d < 0:
        raise InvalidParameter("delta must be >= 0 or None")
    mode = _mode_int(base)
    table = _kernels.lcss_suffix_table(a, b, float(epsilon), d, mode)
    length = int(table[0, 0])
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < len(a) and j < len(b) and table[i, j] > 0:
        in_window = d < 0 or abs(i - j) <= d
        if in_window and _kernels.point_pair_distance(a, i, b, j, mode) <= epsilon:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1, j] == table[i, j]:
            i += 1
        else:
            j += 1
    similarity = length / min(len(a), len(b))
    return LcssResult(length, similarity, MatchSet(tuple(pairs)))


def edit_distance_edr(t1, t2, epsilon: float, base: BaseDistance = EUCLIDEAN) -> int:
    """Edit distance on real sequences: unit-cost indels, free substitutions
    within ``epsilon``."""
    if not (epsilon > 0):
        raise InvalidParameter("epsilon must be > 0")
    a, b = _as_coords(t1), _as_coords(t2)
    _check_pair(a, b, base, require_nonempty=False)
    if len(a) == 0 or len(b) == 0:
        return max(len(a), len(b))
    return int(_kernels.edr_kernel(a, b, float(epsilon), _mode_int(base)))


# ---------------------------------------------------------------------------
# enrichment similarities


def contextual_similarity(
    e1: EnrichedTrajectory, e2: EnrichedTrajectory, schema: ContextSchema
) -> float:
    """Average per-point, per-key agreement of two aligned context series.

    Numeric keys score 1 - |a - b| / range (clamped to [0, 1]); categorical
    keys score 1 on equality. A key present on only one side at an index
    scores 0 for that index.
    """
    if e1.context is None or e2.context is None:
        raise NoContext("both trajectories need a context series")
    if len(e1.context) != len(e2.context):
        raise LengthMismatch(
            "context series lengths differ; resample the trajectories first"
        )
    return _context_series_similarity(e1.context, e2.context, schema)


def _context_series_similarity(series1, series2, schema: ContextSchema) -> float:
    keys1 = set().union(*(s.values.keys() for s in series1)) if series1 else set()
    keys2 = set().union(*(s.values.keys() for s in series2)) if series2 else set()
    if not (keys1 & keys2):
        raise NoSharedSchema("the two context series share no context key")
    total = 0.0
    for s1, s2 in zip(series1, series2):
        union = set(s1.values) | set(s2.values)
        if not union:
            total += 1.0
            continue
        acc = 0.0
        for key in union:
            if key in s1.values and key in s2.values:
                acc += _key_similarity(key, s1.values[key], s2.values[key], schema)
        total += acc / len(union)
    return total / len(series1)


def _key_similarity(key: str, a, b, schema: ContextSchema) -> float:
    spec = schema.get(key)
    if spec is None:
        raise UnknownKey(f"context key {key!r} is not declared in the schema")
    if spec.kind == "categorical":
        return 1.0 if a == b else 0.0
    if isinstance(a, str) or isinstance(b, str):
        raise InvalidValue(f"numeric context key {key!r} holds a non-numeric value")
    if spec.span == 0.0:
        return 1.0 if a == b else 0.0
    return max(0.0, min(1.0, 1.0 - abs(a - b) / spec.span))


def infer_schema(*series) -> ContextSchema:
    """Derive a schema from observed samples: strings are categorical, numbers
    numeric with the observed value range."""
    schema: ContextSchema = {}
    lows: dict[str, float] = {}
    highs: dict[str, float] = {}
    categorical: set[str] = set()
    for samples in series:
        for sample in samples or ():
            for key, value in sample.values.items():
                if isinstance(value, str):
                    categorical.add(key)
                else:
                    lows[key] = min(lows.get(key, value), value)
                    highs[key] = max(highs.get(key, value), value)
    for key in categorical:
        schema[key] = ContextKeySpec("categorical")
    for key in lows:
        if key not in categorical:
            schema[key] = ContextKeySpec("numeric", lows[key], highs[key])
    return schema


def semantic_similarity(e1: EnrichedTrajectory, e2: EnrichedTrajectory) -> float:
    """Coverage-weighted Jaccard over episode labels.

    For each label, coverage is the fraction of a trajectory's points inside
    episodes with that label; the score is sum(min) / sum(max) over all
    labels, and 1.0 when both trajectories have no episodes at all.
    """
    cov1 = _label_coverage(e1)
    cov2 = _label_coverage(e2)
    if not cov1 and not cov2:
        return 1.0
    labels = set(cov1) | set(cov2)
    num = sum(min(cov1.get(l, 0.0), cov2.get(l, 0.0)) for l in labels)
    den = sum(max(cov1.get(l, 0.0), cov2.get(l, 0.0)) for l in labels)
    return num / den


def _label_coverage(e: EnrichedTrajectory) -> dict[str, float]:
    n = len(e)
    cov: dict[str, float] = {}
    for ep in e.episodes:
        cov[ep.label] = cov.get(ep.label, 0.0) + ep.point_count / n
    return cov


def continuity_score(matches) -> float:
    """Reward long contiguous shared segments: sum of squared run lengths over
    the squared total match count. 1.0 iff the matches form a single run."""
    ms = matches if isinstance(matches, MatchSet) else MatchSet(tuple(matches))
    if len(ms) == 0:
        raise EmptyMatchSet("continuity is undefined for an empty match set")
    runs = ms.run_lengths()
    total = sum(runs)
    return sum(r * r for r in runs) / (total * total)


def distance_to_similarity(d: float, sigma: float) -> float:
    """Map a distance onto (0, 1] with exp(-d / sigma)."""
    if d < 0:
        raise InvalidParameter("distance must be >= 0")
    if not (sigma > 0):
        raise InvalidParameter("sigma must be > 0")
    return math.exp(-d / sigma)


# ---------------------------------------------------------------------------
# composite similarity


def spatial_distance(e1, e2, cfg: SimilarityConfig) -> float:
    """The configured spatial metric distance between two (enriched) trajectories.

    Lock-step comparison resamples both onto the longer point count first;
    ``lcss`` contributes 1 - similarity so that larger means farther.
    """
    t1 = e1.trajectory if isinstance(e1, EnrichedTrajectory) else e1
    t2 = e2.trajectory if isinstance(e2, EnrichedTrajectory) else e2
    base = cfg.base
    metric = cfg.spatial_metric
    if metric == "euclidean_lockstep":
        a, b = _aligned_coords(t1, t2)
        _check_pair(a, b, base)
        return float(base.aligned(a, b).mean())
    if metric == "frechet":
        return discrete_frechet(t1, t2, base)
    if metric == "dtw":
        return dtw(t1, t2, base)
    if metric == "lcss":
        return 1.0 - lcss(t1, t2, cfg.epsilon, cfg.delta, base).similarity
    if metric == "edr":
        return float(edit_distance_edr(t1, t2, cfg.epsilon, base))
    raise InvalidConfig(f"unknown spatial metric {metric!r}")


def _aligned_coords(t1: Trajectory, t2: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_coords(t1), _as_coords(t2)
    if len(a) == len(b):
        return a, b
    if not isinstance(t1, Trajectory) or not isinstance(t2, Trajectory):
        raise LengthMismatch(
            "lock-step comparison of raw arrays needs equal point counts"
        )
    k = max(len(a), len(b))
    return _coords_at_count(t1, k), _coords_at_count(t2, k)


def _coords_at_count(t: Trajectory, k: int) -> np.ndarray:
    if len(t) == k:
        return t.coords
    if len(t) == 1:
        return np.repeat(t.coords, k, axis=0)
    grid = np.linspace(t.times[0], t.times[-1], k)
    return interpolate_coords(t.coords, t.times, grid)


def _nearest_sample_indices(times: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Index of the time-nearest original sample per grid point (ties -> earlier)."""
    pos = np.searchsorted(times, grid)
    out = np.empty(len(grid), dtype=int)
    for n, (g, p) in enumerate(zip(grid, pos)):
        if p == 0:
            out[n] = 0
        elif p == len(times):
            out[n] = len(times) - 1
        else:
            out[n] = p - 1 if g - times[p - 1] <= times[p] - g else p
    return out


def _aligned_context(e1: EnrichedTrajectory, e2: EnrichedTrajectory):
    if len(e1) == len(e2):
        return e1.context, e2.context
    k = max(len(e1), len(e2))
    return _context_at_count(e1, k), _context_at_count(e2, k)


def _context_at_count(e: EnrichedTrajectory, k: int) -> tuple[ContextSample, ...]:
    if len(e) == k:
        return e.context
    times = e.trajectory.times
    if len(times) == 1:
        return tuple(e.context[0] for _ in range(k))
    grid = np.linspace(times[0], times[-1], k)
    idx = _nearest_sample_indices(times, grid)
    return tuple(e.context[i] for i in idx)


def composite_similarity(
    e1: EnrichedTrajectory,
    e2: EnrichedTrajectory,
    cfg: SimilarityConfig,
    schema: ContextSchema | None = None,
) -> CompositeScore:
    """Weighted multi-dimensional similarity of two enriched trajectories.

    The spatial score exp(-d / sigma) is blended with the continuity of the
    LCSS match set: (1 - lambda) * spatial + lambda * continuity, where an
    empty match set contributes 0. Temporal overlap of two zero-length spans
    and missing enrichment both score 0 rather than erroring. Weights are
    applied as given; they are not renormalized over missing dimensions.
    """
    if cfg.sigma is None:
        raise InvalidConfig(
            "sigma is unresolved; set it explicitly or build the matrix via "
            "distance_matrix, which resolves sigma from the dataset"
        )
    return _composite_from_spatial(e1, e2, cfg, spatial_distance(e1, e2, cfg), schema)


def _composite_from_spatial(
    e1: EnrichedTrajectory,
    e2: EnrichedTrajectory,
    cfg: SimilarityConfig,
    d_spatial: float,
    schema: ContextSchema | None = None,
) -> CompositeScore:
    t1, t2 = e1.trajectory, e2.trajectory

    s_spatial = distance_to_similarity(d_spatial, cfg.sigma)
    lam = cfg.continuity_blend
    continuity = 0.0
    if lam > 0.0:
        matches = lcss(t1, t2, cfg.epsilon, cfg.delta, cfg.base).matches
        if len(matches) > 0:
            continuity = continuity_score(matches)
            s_spatial = s_spatial + lam * (continuity - s_spatial)
        else:
            s_spatial = (1.0 - lam) * s_spatial

    try:
        s_temporal = temporal_overlap_ratio(time_span(t1), time_span(t2))
    except BothDegenerate:
        s_temporal = 0.0

    if e1.context is None or e2.context is None:
        s_context = 0.0
    else:
        series1, series2 = _aligned_context(e1, e2)
        used = schema if schema is not None else infer_schema(series1, series2)
        try:
            s_context = _context_series_similarity(series1, series2, used)
        except NoSharedSchema:
            s_context = 0.0

    s_semantic = semantic_similarity(e1, e2)

    total = (
        cfg.w_spatial * s_spatial
        + cfg.w_temporal * s_temporal
        + cfg.w_context * s_context
        + cfg.w_semantic * s_semantic
    )
    return CompositeScore(total, s_spatial, s_temporal, s_context, s_semantic, continuity)
