"""Core data model: spatial-temporal points, trajectories, and enrichment.

A trajectory is a finite, time-ordered sequence of positions. On top of the
raw sequence, :class:`EnrichedTrajectory` carries two optional layers: a
per-point context series (e.g. weather at each sample) and a list of labeled
semantic episodes (e.g. "commute" covering points 3..17).

All types are immutable after construction and validated on construction, so
any instance you hold satisfies its invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distance import EUCLIDEAN, BaseDistance
from .errors import (
    DimensionMismatch,
    DimensionUnsupported,
    EmptyTrajectory,
    IndexOutOfRange,
    InvalidParameter,
    LengthMismatch,
    NonFiniteValue,
    NonIncreasingTime,
    OverlappingEpisodes,
    TooFewPoints,
)


@dataclass(frozen=True)
class STPoint:
    """A position in n-dimensional space at one instant."""

    coords: tuple[float, ...]
    t: float

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "t", float(self.t))
        if len(coords) < 1:
            raise DimensionMismatch(0, "a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise NonFiniteValue(0, "point has a non-finite coordinate")
        if not math.isfinite(self.t) or self.t < 0:
            raise NonFiniteValue(0, "timestamp must be finite and >= 0")


@dataclass(frozen=True)
class TimeInterval:
    """A closed time interval; zero length is allowed."""

    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise InvalidParameter("interval endpoints must be finite")
        if self.start > self.end:
            raise InvalidParameter(f"interval start {self.start} exceeds end {self.end}")

    @property
    def length(self) -> float:
        return self.end - self.start

    def intersection_length(self, other: "TimeInterval") -> float:
        return max(0.0, min(self.end, other.end) - max(self.start, other.start))


@dataclass(frozen=True)
class Region:
    """An axis-aligned rectangle; degenerate (zero-area) rectangles allowed."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameter(f"region corner {name} must be finite")
            object.__setattr__(self, name, v)
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise InvalidParameter("region min corner must not exceed max corner")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains_point(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


class Trajectory:
    """An identified, validated sequence of spatial-temporal points.

    Coordinates are held as a read-only ``(p, n)`` float array and timestamps
    as a read-only ``(p,)`` float array with strictly increasing values.
    1-D coordinate input (a flat list of scalars) is accepted and treated as
    ``n = 1``.
    """

    __slots__ = ("id", "coords", "times")

    def __init__(self, id: str, coords, times):
        self.id = str(id)
        coords, times = _validated_arrays(coords, times)
        coords.flags.writeable = False
        times.flags.writeable = False
        self.coords = coords
        self.times = times

    @classmethod
    def from_points(cls, id: str, points) -> "Trajectory":
        """Build from an iterable of :class:`STPoint` (or (coords, t) pairs)."""
        pts = [p if isinstance(p, STPoint) else STPoint(tuple(p[0]), p[1]) for p in points]
        if not pts:
            raise EmptyTrajectory("trajectory has no points")
        return cls(id, [p.coords for p in pts], [p.t for p in pts])

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    @property
    def points(self) -> tuple[STPoint, ...]:
        return tuple(
            STPoint(tuple(self.coords[i]), float(self.times[i])) for i in range(len(self))
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.id == other.id
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.times, other.times)
        )

    def __hash__(self):
        return hash((self.id, self.coords.tobytes(), self.times.tobytes()))

    def __repr__(self) -> str:
        return f"Trajectory(id={self.id!r}, points={len(self)}, dim={self.dimension})"


def _validated_arrays(coords, times) -> tuple[np.ndarray, np.ndarray]:
    """Normalize and validate raw coordinate/timestamp input.

    Raises the error for the first violated invariant, scanning points in
    order so the reported index is the earliest offender.
    """
    rows = list(coords)
    if len(rows) == 0:
        raise EmptyTrajectory("trajectory has no points")
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        widths = [np.size(r) for r in rows]
        for i, w in enumerate(widths):
            if w != widths[0]:
                raise DimensionMismatch(i) from None
        raise NonFiniteValue(0, "coordinates are not numeric") from None
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(0, "coordinates must be scalars or flat vectors")
    if arr.shape[1] < 1:
        raise DimensionMismatch(0, "a point needs at least one coordinate")

    t = np.asarray(list(times), dtype=float)
    if t.ndim != 1 or len(t) != len(arr):
        raise LengthMismatch("coords and times must have the same length")

    coord_ok = np.isfinite(arr).all(axis=1)
    time_ok = np.isfinite(t) & (t >= 0)
    bad = ~(coord_ok & time_ok)
    if bad.any():
        raise NonFiniteValue(int(np.argmax(bad)))
    if len(t) > 1:
        non_increasing = t[1:] <= t[:-1]
        if non_increasing.any():
            raise NonIncreasingTime(int(np.argmax(non_increasing)) + 1)
    return arr, t


def validate(candidate) -> Trajectory:
    """Return a valid :class:`Trajectory` or raise the first violated invariant.

    Accepts an existing :class:`Trajectory` (returned unchanged), an
    ``(id, coords, times)`` triple, or an ``(id, points)`` pair of
    :class:`STPoint` entries.
    """
    if isinstance(candidate, Trajectory):
        return candidate
    if isinstance(candidate, (tuple, list)):
        if len(candidate) == 3:
            return Trajectory(candidate[0], candidate[1], candidate[2])
        if len(candidate) == 2:
            return Trajectory.from_points(candidate[0], candidate[1])
    raise InvalidParameter("expected Trajectory, (id, coords, times), or (id, points)")


def time_span(traj: Trajectory) -> TimeInterval:
    """Temporal extent [t_first, t_last]; zero-length for a single point."""
    return TimeInterval(float(traj.times[0]), float(traj.times[-1]))


def path_length(traj: Trajectory, base: BaseDistance = EUCLIDEAN) -> float:
    """Total length of the polyline through the points; 0 for a single point."""
    return float(base.consecutive(traj.coords).sum())


def bounding_region(traj: Trajectory) -> Region:
    """Smallest axis-aligned rectangle containing all points (2-D only)."""
    if traj.dimension != 2:
        raise DimensionUnsupported(
            f"bounding_region requires 2-D trajectories, got dimension {traj.dimension}"
        )
    mins = traj.coords.min(axis=0)
    maxs = traj.coords.max(axis=0)
    return Region(float(mins[0]), float(mins[1]), float(maxs[0]), float(maxs[1]))


def resample(traj: Trajectory, k: int) -> Trajectory:
    """Resample onto k uniformly spaced timestamps over the same time span.

    Coordinates are linearly interpolated between the bracketing original
    points; the first and last points are preserved exactly.
    """
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InvalidParameter("resample needs an integer k >= 2")
    if len(traj) < 2:
        raise TooFewPoints("resample needs a trajectory with at least 2 points")
    new_times = np.linspace(traj.times[0], traj.times[-1], int(k))
    new_coords = interpolate_coords(traj.coords, traj.times, new_times)
    return Trajectory(traj.id, new_coords, new_times)


def interpolate_coords(coords: np.ndarray, times: np.ndarray, at: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation of each coordinate column at new times."""
    out = np.empty((len(at), coords.shape[1]))
    for d in range(coords.shape[1]):
        out[:, d] = np.interp(at, times, coords[:, d])
    return out


@dataclass(frozen=True)
class ContextSample:
    """Context values observed at one trajectory point.

    Values are numeric (real, range-checked against the dataset schema at
    ingestion) or categorical (strings). A sample may carry any subset of the
    dataset's context keys.
    """

    values: dict[str, float | str] = field(default_factory=dict)

    def __post_init__(self):
        norm: dict[str, float | str] = {}
        for key, value in dict(self.values).items():
            if isinstance(value, str):
                norm[str(key)] = value
            else:
                v = float(value)
                if not math.isfinite(v):
                    raise InvalidParameter(f"context value for {key!r} is not finite")
                norm[str(key)] = v
        object.__setattr__(self, "values", norm)

    def keys(self):
        return self.values.keys()

    def get(self, key, default=None):
        return self.values.get(key, default)


@dataclass(frozen=True)
class ContextKeySpec:
    """Declared kind (and numeric range) of one context key."""

    kind: str  # "numeric" | "categorical"
    min: float | None = None
    max: float | None = None

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise InvalidParameter(f"unknown context kind {self.kind!r}")
        if self.kind == "numeric":
            if self.min is None or self.max is None:
                raise InvalidParameter("numeric context keys need a [min, max] range")
            object.__setattr__(self, "min", float(self.min))
            object.__setattr__(self, "max", float(self.max))
            if not (math.isfinite(self.min) and math.isfinite(self.max)):
                raise InvalidParameter("numeric context range must be finite")
            if self.min > self.max:
                raise InvalidParameter("numeric context range has min > max")
        elif self.min is not None or self.max is not None:
            raise InvalidParameter("categorical context keys take no range")

    @property
    def span(self) -> float:
        return self.max - self.min


ContextSchema = dict[str, ContextKeySpec]


@dataclass(frozen=True)
class SemanticEpisode:
    """A labeled, inclusive index range [start, end] of trajectory points."""

    label: str
    start: int
    end: int

    def __post_init__(self):
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "end", int(self.end))
        if self.start < 0 or self.end < self.start:
            raise InvalidParameter(
                f"episode needs 0 <= start <= end, got [{self.start}, {self.end}]"
            )

    @property
    def point_count(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class EnrichedTrajectory:
    """A trajectory plus its optional context series and semantic episodes.

    The context series, when present, has exactly one sample per point.
    Episodes are stored sorted by start index and must not overlap.
    """

    trajectory: Trajectory
    context: tuple[ContextSample, ...] | None = None
    episodes: tuple[SemanticEpisode, ...] = ()

    def __post_init__(self):
        n = len(self.trajectory)
        if self.context is not None:
            context = tuple(self.context)
            if len(context) != n:
                raise LengthMismatch(
                    f"context series has {len(context)} samples for {n} points"
                )
            object.__setattr__(self, "context", context)
        episodes = tuple(sorted(self.episodes, key=lambda e: (e.start, e.end)))
        prev: SemanticEpisode | None = None
        for ep in episodes:
            if ep.end >= n:
                raise IndexOutOfRange(
                    f"episode [{ep.start}, {ep.end}] exceeds last point index {n - 1}"
                )
            if prev is not None and ep.start <= prev.end:
                raise OverlappingEpisodes(self.trajectory.id)
            prev = ep
        object.__setattr__(self, "episodes", episodes)

    @property
    def id(self) -> str:
        return self.trajectory.id

    def __len__(self) -> int:
        return len(self.trajectory)


def enrich(traj: Trajectory, context=None, episodes=()) -> EnrichedTrajectory:
    """Convenience wrapper building an :class:`EnrichedTrajectory`."""
    ctx = None if context is None else tuple(
        s if isinstance(s, ContextSample) else ContextSample(dict(s)) for s in context
    )
    eps = tuple(
        e if isinstance(e, SemanticEpisode) else SemanticEpisode(e[0], e[1], e[2])
        for e in episodes
    )
    return EnrichedTrajectory(traj, ctx, eps)
