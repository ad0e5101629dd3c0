"""File ingestion and serialization.

All files are UTF-8 CSV-like text with LF line endings and ``.`` decimals.
Floats are written in shortest round-trip form, so write-then-read
reproduces values exactly.

Formats:

* points:    ``traj_id,t,x,y[,z]`` — rows grouped by id in file order
* context:   ``traj_id,point_index,key,value``
* semantics: ``traj_id,start_index,end_index,label``
* matrix:    ``id`` header row/column around the full symmetric values
* clusters:  ``traj_id,cluster`` with the literal ``noise`` for noise points
* config:    line-oriented ``key = value`` with ``#`` comments
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clustering import NOISE, ClusterResult, Dendrogram, DistanceMatrix
from .errors import (
    IndexOutOfRange,
    InvalidValue,
    OverlappingEpisodes,
    ParseError,
    TrajkitError,
    UnknownKey,
    UnknownOption,
    ValidationError,
)
from .model import (
    ContextKeySpec,
    ContextSample,
    ContextSchema,
    EnrichedTrajectory,
    SemanticEpisode,
    Trajectory,
)
from .similarity import MATRIX_METRICS, SPATIAL_METRICS, SimilarityConfig

#: dataset coordinate modes and the base distance they select
COORD_MODES = {"projected": "euclidean", "geographic": "haversine"}

POINTS_HEADERS = {"traj_id,t,x,y": 2, "traj_id,t,x,y,z": 3}
CONTEXT_HEADER = "traj_id,point_index,key,value"
SEMANTICS_HEADER = "traj_id,start_index,end_index,label"
CLUSTERS_HEADER = "traj_id,cluster"
DENDROGRAM_HEADER = "left,right,height,count"


def _fmt(value: float) -> str:
    return repr(float(value))


def _check_field(value: str, what: str) -> str:
    if "," in value or "\n" in value or "\r" in value:
        raise InvalidValue(f"{what} {value!r} must not contain commas or line breaks")
    if value == "":
        raise InvalidValue(f"{what} must not be empty")
    return value


def _lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _split(line: str, lineno: int, n_fields: int) -> list[str]:
    parts = line.split(",")
    if len(parts) != n_fields:
        raise ParseError(lineno, f"expected {n_fields} comma-separated fields, got {len(parts)}")
    return parts


def _parse_float(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(lineno, f"{what} {token!r} is not a number") from None


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"{what} {token!r} is not an integer") from None


# ---------------------------------------------------------------------------
# trajectory points


def read_points_csv(path) -> list[Trajectory]:
    """Parse a points file into validated trajectories, preserving file order."""
    lines = _lines(path)
    if not lines:
        raise ParseError(1, "missing header; expected traj_id,t,x,y[,z]")
    header = lines[0]
    if header not in POINTS_HEADERS:
        raise ParseError(1, f"unrecognized header {header!r}; expected traj_id,t,x,y[,z]")
    dim = POINTS_HEADERS[header]
    grouped: dict[str, list[tuple[float, list[float]]]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = _split(line, lineno, 2 + dim)
        traj_id = parts[0]
        if not traj_id:
            raise ParseError(lineno, "empty traj_id")
        t = _parse_float(parts[1], lineno, "timestamp")
        coords = [_parse_float(p, lineno, "coordinate") for p in parts[2:]]
        grouped.setdefault(traj_id, []).append((t, coords))
    out = []
    for traj_id, rows in grouped.items():
        try:
            out.append(Trajectory(traj_id, [c for _, c in rows], [t for t, _ in rows]))
        except TrajkitError as exc:
            raise ValidationError(traj_id, exc) from exc
    return out


def write_points_csv(trajectories, path) -> None:
    trajs = [t.trajectory if isinstance(t, EnrichedTrajectory) else t for t in trajectories]
    dims = {t.dimension for t in trajs}
    if dims - {2, 3} or len(dims) > 1:
        raise InvalidValue(
            f"points files carry a single dimension of 2 or 3, got dimensions {sorted(dims)}"
        )
    dim = dims.pop() if dims else 2
    header = "traj_id,t,x,y" if dim == 2 else "traj_id,t,x,y,z"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for t in trajs:
            _check_field(t.id, "traj_id")
            for row, ts in zip(t.coords, t.times):
                fields = [t.id, _fmt(ts)] + [_fmt(c) for c in row]
                fh.write(",".join(fields) + "\n")


# ---------------------------------------------------------------------------
# context


def read_context_csv(path, schema: ContextSchema, trajectories) -> dict:
    """Per-trajectory context series typed against the declared schema.

    ``trajectories`` maps id -> Trajectory and provides the valid ids and
    point counts. Trajectories never mentioned get no context series (None);
    mentioned ones get one sample per point, with unmentioned (index, key)
    pairs simply absent. Later duplicate assignments override earlier ones.
    """
    lines = _lines(path)
    values: dict[str, dict[int, dict[str, float | str]]] = {}
    if lines and lines[0] != CONTEXT_HEADER:
        raise ParseError(1, f"unrecognized header {lines[0]!r}; expected {CONTEXT_HEADER}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        traj_id, index_token, key, raw = _split(line, lineno, 4)
        if traj_id not in trajectories:
            raise ValidationError(traj_id, "context row references an unknown trajectory")
        index = _parse_int(index_token, lineno, "point_index")
        count = len(trajectories[traj_id])
        if not 0 <= index < count:
            raise IndexOutOfRange(
                f"line {lineno}: point_index {index} outside [0, {count - 1}] "
                f"for trajectory {traj_id!r}"
            )
        if key not in schema:
            raise UnknownKey(f"line {lineno}: context key {key!r} is not declared")
        spec = schema[key]
        if spec.kind == "numeric":
            value = _parse_float(raw, lineno, f"value for {key!r}")
            if not spec.min <= value <= spec.max:
                raise InvalidValue(
                    f"line {lineno}: value {value} for {key!r} outside its range "
                    f"[{spec.min}, {spec.max}]"
                )
        else:
            value = raw
        values.setdefault(traj_id, {}).setdefault(index, {})[key] = value
    out = {}
    for traj_id, by_index in values.items():
        count = len(trajectories[traj_id])
        out[traj_id] = [ContextSample(by_index.get(i, {})) for i in range(count)]
    return out


def write_context_csv(bundle_or_mapping, path) -> None:
    items = _enriched_items(bundle_or_mapping)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CONTEXT_HEADER + "\n")
        for traj_id, enriched in items:
            if enriched.context is None:
                continue
            _check_field(traj_id, "traj_id")
            for index, sample in enumerate(enriched.context):
                for key in sorted(sample.values):
                    value = sample.values[key]
                    _check_field(key, "context key")
                    token = value if isinstance(value, str) else _fmt(value)
                    _check_field(token, "context value")
                    fh.write(f"{traj_id},{index},{key},{token}\n")


# ---------------------------------------------------------------------------
# semantics


def read_semantics_csv(path, trajectories) -> dict:
    """Per-trajectory episode lists, validated for bounds and non-overlap.

    An empty or header-only file is valid and yields no episodes.
    """
    lines = _lines(path)
    if lines and lines[0] != SEMANTICS_HEADER:
        raise ParseError(1, f"unrecognized header {lines[0]!r}; expected {SEMANTICS_HEADER}")
    episodes: dict[str, list[SemanticEpisode]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        traj_id, start_token, end_token, label = _split(line, lineno, 4)
        if traj_id not in trajectories:
            raise ValidationError(traj_id, "semantic row references an unknown trajectory")
        start = _parse_int(start_token, lineno, "start_index")
        end = _parse_int(end_token, lineno, "end_index")
        if start < 0 or end < start:
            raise ParseError(lineno, f"need 0 <= start <= end, got [{start}, {end}]")
        count = len(trajectories[traj_id])
        if end >= count:
            raise IndexOutOfRange(
                f"line {lineno}: end_index {end} outside [0, {count - 1}] "
                f"for trajectory {traj_id!r}"
            )
        if not label:
            raise ParseError(lineno, "empty label")
        episodes.setdefault(traj_id, []).append(SemanticEpisode(label, start, end))
    for traj_id, eps in episodes.items():
        eps.sort(key=lambda e: (e.start, e.end))
        for prev, cur in zip(eps, eps[1:]):
            if cur.start <= prev.end:
                raise OverlappingEpisodes(traj_id)
    return episodes


def write_semantics_csv(bundle_or_mapping, path) -> None:
    items = _enriched_items(bundle_or_mapping)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SEMANTICS_HEADER + "\n")
        for traj_id, enriched in items:
            for ep in enriched.episodes:
                _check_field(traj_id, "traj_id")
                _check_field(ep.label, "label")
                fh.write(f"{traj_id},{ep.start},{ep.end},{ep.label}\n")


# ---------------------------------------------------------------------------
# dataset bundle


@dataclass
class DatasetBundle:
    """A validated dataset: enriched trajectories plus dataset-level metadata."""

    trajectories: dict[str, EnrichedTrajectory]
    mode: str = "projected"
    schema: ContextSchema = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in COORD_MODES:
            raise InvalidValue(f"unknown coordinate mode {self.mode!r}")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.trajectories)

    @property
    def base_mode(self) -> str:
        return COORD_MODES[self.mode]

    def enriched(self) -> list[EnrichedTrajectory]:
        return list(self.trajectories.values())

    def __len__(self) -> int:
        return len(self.trajectories)


def _enriched_items(bundle_or_mapping):
    if isinstance(bundle_or_mapping, DatasetBundle):
        return list(bundle_or_mapping.trajectories.items())
    items = []
    for value in bundle_or_mapping.values() if hasattr(bundle_or_mapping, "values") else bundle_or_mapping:
        enriched = value if isinstance(value, EnrichedTrajectory) else EnrichedTrajectory(value)
        items.append((enriched.id, enriched))
    return items


def load_dataset(
    points_path,
    context_path=None,
    semantics_path=None,
    schema: ContextSchema | None = None,
    mode: str = "projected",
) -> DatasetBundle:
    """Read and cross-validate a points file plus optional enrichment files."""
    trajectories = {t.id: t for t in read_points_csv(points_path)}
    schema = dict(schema or {})
    context = (
        read_context_csv(context_path, schema, trajectories) if context_path else {}
    )
    episodes = read_semantics_csv(semantics_path, trajectories) if semantics_path else {}
    enriched = {}
    for traj_id, traj in trajectories.items():
        enriched[traj_id] = EnrichedTrajectory(
            traj,
            tuple(context[traj_id]) if traj_id in context else None,
            tuple(episodes.get(traj_id, ())),
        )
    return DatasetBundle(enriched, mode=mode, schema=schema)


# ---------------------------------------------------------------------------
# distance matrices, clusters, dendrograms


def write_matrix_csv(matrix: DistanceMatrix, path) -> None:
    for traj_id in matrix.ids:
        _check_field(traj_id, "id")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id," + ",".join(matrix.ids) + "\n")
        for i, traj_id in enumerate(matrix.ids):
            fh.write(traj_id + "," + ",".join(_fmt(v) for v in matrix.values[i]) + "\n")


def read_matrix_csv(path) -> DistanceMatrix:
    lines = _lines(path)
    if not lines or not lines[0].startswith("id,"):
        raise ParseError(1, "missing matrix header starting with 'id,'")
    ids = lines[0].split(",")[1:]
    n = len(ids)
    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) != n:
        raise ParseError(len(lines), f"expected {n} matrix rows, got {len(rows)}")
    values = []
    for r, line in enumerate(rows):
        lineno = r + 2
        parts = _split(line, lineno, n + 1)
        if parts[0] != ids[r]:
            raise ParseError(lineno, f"row id {parts[0]!r} does not match header id {ids[r]!r}")
        values.append([_parse_float(p, lineno, "distance") for p in parts[1:]])
    return DistanceMatrix(tuple(ids), values)


def write_clusters_csv(result: ClusterResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CLUSTERS_HEADER + "\n")
        for traj_id, label in zip(result.ids, result.labels):
            _check_field(traj_id, "traj_id")
            fh.write(f"{traj_id},{'noise' if label == NOISE else label}\n")


def write_dendrogram_csv(dendrogram: Dendrogram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DENDROGRAM_HEADER + "\n")
        for m in dendrogram.merges:
            fh.write(f"{m.left},{m.right},{_fmt(m.height)},{m.count}\n")


def write_report(
    path,
    parameters: dict,
    dimension_summary: dict | None = None,
    silhouette: float | None = None,
    cluster_result: ClusterResult | None = None,
) -> None:
    """Human-readable run report: parameter echo, per-dimension similarity
    summaries, and clustering quality."""
    out = ["trajkit report", "==============", "", "parameters", "----------"]
    for key in sorted(parameters):
        out.append(f"{key} = {parameters[key]}")
    if dimension_summary:
        out += ["", "per-dimension similarity", "------------------------"]
        if "sigma" in dimension_summary:
            out.append(f"sigma = {dimension_summary['sigma']}")
        for name in ("spatial", "temporal", "contextual", "semantic", "continuity", "total"):
            stats = dimension_summary.get(name)
            if stats:
                out.append(
                    f"{name:<11} mean={stats['mean']:.6f} "
                    f"min={stats['min']:.6f} max={stats['max']:.6f}"
                )
    if cluster_result is not None:
        out += ["", "clustering", "----------"]
        out.append(f"algorithm = {cluster_result.algorithm}")
        out.append(f"clusters = {cluster_result.k}")
        if cluster_result.k:
            out.append("sizes = " + ", ".join(str(s) for s in cluster_result.sizes()))
        out.append(f"noise = {cluster_result.noise_count}")
        out.append(
            "silhouette = " + ("n/a" if silhouette is None else f"{silhouette:.6f}")
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    """Everything a CLI run needs: similarity knobs, metric, clustering
    parameters, coordinate mode, and the context schema."""

    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    metric: str = "dtw"
    mode: str = "projected"
    schema: ContextSchema = field(default_factory=dict)
    eps: float | None = None
    min_pts: int = 5
    linkage: str | None = None
    k: int | None = None
    height: float | None = None
    seed: int = 0
    jobs: int | None = None


_CONFIG_KEYS = (
    "metric",
    "spatial_metric",
    "mode",
    "w_spatial",
    "w_temporal",
    "w_context",
    "w_semantic",
    "lambda",
    "epsilon",
    "delta",
    "sigma",
    "eps",
    "min_pts",
    "linkage",
    "k",
    "height",
    "seed",
    "jobs",
)


def _config_float(key: str, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise InvalidValue(f"option {key!r}: {token!r} is not a number") from None


def _config_int(key: str, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InvalidValue(f"option {key!r}: {token!r} is not an integer") from None


def read_config(path) -> RunConfig:
    """Parse a ``key = value`` configuration file.

    Unset keys keep their defaults: equal weights of 0.25, lambda 0.5,
    unbounded delta, sigma resolved from the dataset ("auto"), metric dtw,
    projected coordinates. Context keys are declared as
    ``context.<key> = numeric <min> <max>`` or ``context.<key> = categorical``.
    """
    raw: dict[str, str] = {}
    schema: ContextSchema = {}
    for lineno, line in enumerate(_lines(path), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(lineno, "expected 'key = value'")
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("context."):
            schema[key[len("context."):]] = _parse_key_spec(key, value)
            continue
        if key not in _CONFIG_KEYS:
            raise UnknownOption(f"line {lineno}: unknown option {key!r}")
        raw[key] = value

    similarity_kwargs: dict = {"mode": COORD_MODES[_coord_mode(raw)]}
    for key, target in (
        ("w_spatial", "w_spatial"),
        ("w_temporal", "w_temporal"),
        ("w_context", "w_context"),
        ("w_semantic", "w_semantic"),
        ("lambda", "continuity_blend"),
        ("epsilon", "epsilon"),
    ):
        if key in raw:
            similarity_kwargs[target] = _config_float(key, raw[key])
    if "delta" in raw:
        similarity_kwargs["delta"] = (
            None if raw["delta"] == "unbounded" else _config_int("delta", raw["delta"])
        )
    if "sigma" in raw:
        similarity_kwargs["sigma"] = (
            None if raw["sigma"] == "auto" else _config_float("sigma", raw["sigma"])
        )
    if "spatial_metric" in raw:
        if raw["spatial_metric"] not in SPATIAL_METRICS:
            raise InvalidValue(f"unknown spatial_metric {raw['spatial_metric']!r}")
        similarity_kwargs["spatial_metric"] = raw["spatial_metric"]
    similarity = SimilarityConfig(**similarity_kwargs)

    cfg = RunConfig(similarity=similarity, mode=_coord_mode(raw), schema=schema)
    if "metric" in raw:
        if raw["metric"] not in MATRIX_METRICS:
            raise InvalidValue(f"unknown metric {raw['metric']!r}")
        cfg.metric = raw["metric"]
    if "eps" in raw:
        cfg.eps = _config_float("eps", raw["eps"])
    if "min_pts" in raw:
        cfg.min_pts = _config_int("min_pts", raw["min_pts"])
    if "linkage" in raw:
        if raw["linkage"] not in ("single", "complete", "average"):
            raise InvalidValue(f"unknown linkage {raw['linkage']!r}")
        cfg.linkage = raw["linkage"]
    if "k" in raw:
        cfg.k = _config_int("k", raw["k"])
    if "height" in raw:
        cfg.height = _config_float("height", raw["height"])
    if "seed" in raw:
        cfg.seed = _config_int("seed", raw["seed"])
    if "jobs" in raw:
        cfg.jobs = _config_int("jobs", raw["jobs"])
    return cfg


def _coord_mode(raw: dict) -> str:
    mode = raw.get("mode", "projected")
    if mode not in COORD_MODES:
        raise InvalidValue(f"unknown mode {mode!r}; expected projected or geographic")
    return mode


def _parse_key_spec(key: str, value: str) -> ContextKeySpec:
    parts = value.split()
    if parts and parts[0] == "categorical" and len(parts) == 1:
        return ContextKeySpec("categorical")
    if len(parts) == 3 and parts[0] == "numeric":
        return ContextKeySpec(
            "numeric", _config_float(key, parts[1]), _config_float(key, parts[2])
        )
    raise InvalidValue(
        f"option {key!r}: expected 'numeric <min> <max>' or 'categorical', got {value!r}"
    )
