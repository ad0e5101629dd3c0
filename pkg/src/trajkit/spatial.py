"""Spatial relations between planar regions: topology, distance, direction,
and measurement comparison of trajectories.

Regions are axis-aligned rectangles (typically trajectory bounding boxes).
Rectangle semantics make the eight topological relations exact: no boundary
tolerance is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .distance import EUCLIDEAN, BaseDistance
from .errors import DegenerateRegion
from .model import Region, Trajectory, path_length, time_span

SAME_POSITION_TOL = 1e-9

TIE = "tie"


class TopologicalRelation(Enum):
    DISJOINT = "disjoint"
    MEETS = "meets"
    OVERLAPS = "overlaps"
    EQUALS = "equals"
    COVERS = "covers"
    COVERED_BY = "covered_by"
    CONTAINS = "contains"
    INSIDE = "inside"

    def __str__(self) -> str:
        return self.value


class DirectionRelation(Enum):
    NORTH = "north"
    NORTH_EAST = "north_east"
    EAST = "east"
    SOUTH_EAST = "south_east"
    SOUTH = "south"
    SOUTH_WEST = "south_west"
    WEST = "west"
    NORTH_WEST = "north_west"
    SAME_POSITION = "same_position"

    def __str__(self) -> str:
        return self.value


def topological_relation(a: Region, b: Region) -> TopologicalRelation:
    """Classify two positive-area rectangles into one of 8 relations.

    disjoint: closures do not intersect; meets: boundaries touch while
    interiors stay disjoint; contains/inside: strict interior containment;
    covers/covered_by: containment that shares boundary; overlaps: interiors
    intersect with neither side containing the other.
    """
    if a.area <= 0.0 or b.area <= 0.0:
        raise DegenerateRegion("topological relations require positive-area regions")
    if a == b:
        return TopologicalRelation.EQUALS
    closures_disjoint = (
        a.x_max < b.x_min or b.x_max < a.x_min or a.y_max < b.y_min or b.y_max < a.y_min
    )
    if closures_disjoint:
        return TopologicalRelation.DISJOINT
    interiors_intersect = (
        a.x_min < b.x_max and b.x_min < a.x_max and a.y_min < b.y_max and b.y_min < a.y_max
    )
    if not interiors_intersect:
        return TopologicalRelation.MEETS
    a_subset = (
        a.x_min >= b.x_min and a.x_max <= b.x_max and a.y_min >= b.y_min and a.y_max <= b.y_max
    )
    if a_subset:
        strict = (
            a.x_min > b.x_min and a.x_max < b.x_max and a.y_min > b.y_min and a.y_max < b.y_max
        )
        return TopologicalRelation.INSIDE if strict else TopologicalRelation.COVERED_BY
    b_subset = (
        b.x_min >= a.x_min and b.x_max <= a.x_max and b.y_min >= a.y_min and b.y_max <= a.y_max
    )
    if b_subset:
        strict = (
            b.x_min > a.x_min and b.x_max < a.x_max and b.y_min > a.y_min and b.y_max < a.y_max
        )
        return TopologicalRelation.CONTAINS if strict else TopologicalRelation.COVERS
    return TopologicalRelation.OVERLAPS


def centroid_distance(a: Region, b: Region, base: BaseDistance = EUCLIDEAN) -> float:
    """Base distance between the rectangle centroids."""
    return base(a.center, b.center)


def min_distance(a: Region, b: Region) -> float:
    """Minimum Euclidean distance between two closed rectangles (0 if they touch)."""
    dx = max(a.x_min - b.x_max, b.x_min - a.x_max, 0.0)
    dy = max(a.y_min - b.y_max, b.y_min - a.y_max, 0.0)
    return math.hypot(dx, dy)


def direction_relation(a: Region, b: Region) -> DirectionRelation:
    """Compass sector of A's centroid as seen from B's centroid.

    The four cardinal sectors are the open 90-degree cones between the two
    45-degree diagonals; a centroid lying exactly on a diagonal classifies as
    the intercardinal direction. Centroids within ``SAME_POSITION_TOL`` of
    each other are ``same_position``.
    """
    ax, ay = a.center
    bx, by = b.center
    dx = ax - bx
    dy = ay - by
    if math.hypot(dx, dy) <= SAME_POSITION_TOL:
        return DirectionRelation.SAME_POSITION
    if abs(dx) == abs(dy):
        if dx > 0:
            return DirectionRelation.NORTH_EAST if dy > 0 else DirectionRelation.SOUTH_EAST
        return DirectionRelation.NORTH_WEST if dy > 0 else DirectionRelation.SOUTH_WEST
    if abs(dy) > abs(dx):
        return DirectionRelation.NORTH if dy > 0 else DirectionRelation.SOUTH
    return DirectionRelation.EAST if dx > 0 else DirectionRelation.WEST


@dataclass(frozen=True)
class MeasurementComparison:
    """Which trajectory is longer in path and in duration, plus the ratio."""

    longer: str
    longer_duration: str
    length_ratio: float


def measurement_compare(
    t1: Trajectory, t2: Trajectory, base: BaseDistance = EUCLIDEAN
) -> MeasurementComparison:
    """Compare path lengths and durations of two trajectories.

    ``longer`` / ``longer_duration`` hold the winning trajectory id or the
    literal ``"tie"``. The ratio is path_length(t1) / path_length(t2) with an
    infinity sentinel when t2 has zero length.
    """
    len1 = path_length(t1, base)
    len2 = path_length(t2, base)
    dur1 = time_span(t1).length
    dur2 = time_span(t2).length
    longer = TIE if len1 == len2 else (t1.id if len1 > len2 else t2.id)
    longer_duration = TIE if dur1 == dur2 else (t1.id if dur1 > dur2 else t2.id)
    ratio = math.inf if len2 == 0.0 else len1 / len2
    return MeasurementComparison(longer, longer_duration, ratio)
