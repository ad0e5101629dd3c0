"""trajkit: trajectory similarity and clustering with contextual and
semantic enrichment.

The library models trajectories along four dimensions — space, time,
context, and semantics — provides the classical trajectory distance metrics
plus a weighted multi-dimensional similarity with a continuity-aware overlap
term, and clusters trajectories through density-based, hierarchical, and
partition-based algorithms over precomputed distance matrices.
"""

from .clustering import (
    NOISE,
    ClusterResult,
    Dendrogram,
    DistanceMatrix,
    KMedoidsResult,
    Merge,
    agglomerative,
    as_distance_matrix,
    composite_distance_matrix,
    cut_dendrogram,
    dbscan,
    distance_matrix,
    k_medoids,
    resolve_sigma,
    silhouette,
)
from .distance import EARTH_RADIUS_M, EUCLIDEAN, HAVERSINE, BaseDistance
from .errors import TrajkitError
from .io import DatasetBundle, RunConfig, load_dataset, read_config
from .model import (
    ContextKeySpec,
    ContextSample,
    EnrichedTrajectory,
    Region,
    STPoint,
    SemanticEpisode,
    TimeInterval,
    Trajectory,
    bounding_region,
    enrich,
    path_length,
    resample,
    time_span,
    validate,
)
from .similarity import (
    CompositeScore,
    LcssResult,
    MatchSet,
    SimilarityConfig,
    composite_similarity,
    contextual_similarity,
    continuity_score,
    discrete_frechet,
    distance_to_similarity,
    dtw,
    edit_distance_edr,
    infer_schema,
    lcss,
    lockstep_euclidean,
    semantic_similarity,
    spatial_distance,
)
from .spatial import (
    DirectionRelation,
    MeasurementComparison,
    TopologicalRelation,
    centroid_distance,
    direction_relation,
    measurement_compare,
    min_distance,
    topological_relation,
)
from .temporal import AllenRelation, allen_relation, temporal_overlap_ratio

__version__ = "0.1.0"

__all__ = [
    "AllenRelation",
    "BaseDistance",
    "ClusterResult",
    "CompositeScore",
    "ContextKeySpec",
    "ContextSample",
    "DatasetBundle",
    "Dendrogram",
    "DirectionRelation",
    "DistanceMatrix",
    "EARTH_RADIUS_M",
    "EUCLIDEAN",
    "EnrichedTrajectory",
    "HAVERSINE",
    "KMedoidsResult",
    "LcssResult",
    "MatchSet",
    "MeasurementComparison",
    "Merge",
    "NOISE",
    "Region",
    "RunConfig",
    "STPoint",
    "SemanticEpisode",
    "SimilarityConfig",
    "TimeInterval",
    "TopologicalRelation",
    "Trajectory",
    "TrajkitError",
    "agglomerative",
    "allen_relation",
    "as_distance_matrix",
    "bounding_region",
    "centroid_distance",
    "composite_distance_matrix",
    "composite_similarity",
    "contextual_similarity",
    "continuity_score",
    "cut_dendrogram",
    "dbscan",
    "direction_relation",
    "discrete_frechet",
    "distance_matrix",
    "distance_to_similarity",
    "dtw",
    "edit_distance_edr",
    "enrich",
    "infer_schema",
    "k_medoids",
    "lcss",
    "load_dataset",
    "lockstep_euclidean",
    "measurement_compare",
    "min_distance",
    "path_length",
    "read_config",
    "resample",
    "resolve_sigma",
    "semantic_similarity",
    "silhouette",
    "spatial_distance",
    "time_span",
    "topological_relation",
    "validate",
]
