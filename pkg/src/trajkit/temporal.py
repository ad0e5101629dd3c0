"""Allen interval relations and temporal overlap similarity.

The 13 Allen relations are jointly exhaustive and pairwise disjoint over
ordered interval pairs, including zero-length intervals: a degenerate
interval sitting on another's start (end) point classifies into the
starts/started_by (finishes/finished_by) family rather than meets/met_by.
"""

from __future__ import annotations

from enum import Enum

from .errors import BothDegenerate
from .model import TimeInterval


class AllenRelation(Enum):
    BEFORE = "before"
    MEETS = "meets"
    OVERLAPS = "overlaps"
    STARTS = "starts"
    DURING = "during"
    FINISHES = "finishes"
    EQUAL = "equal"
    AFTER = "after"
    MET_BY = "met_by"
    OVERLAPPED_BY = "overlapped_by"
    STARTED_BY = "started_by"
    CONTAINS = "contains"
    FINISHED_BY = "finished_by"

    @property
    def inverse(self) -> "AllenRelation":
        return _INVERSE[self]

    def __str__(self) -> str:
        return self.value


_INVERSE = {
    AllenRelation.BEFORE: AllenRelation.AFTER,
    AllenRelation.AFTER: AllenRelation.BEFORE,
    AllenRelation.MEETS: AllenRelation.MET_BY,
    AllenRelation.MET_BY: AllenRelation.MEETS,
    AllenRelation.OVERLAPS: AllenRelation.OVERLAPPED_BY,
    AllenRelation.OVERLAPPED_BY: AllenRelation.OVERLAPS,
    AllenRelation.STARTS: AllenRelation.STARTED_BY,
    AllenRelation.STARTED_BY: AllenRelation.STARTS,
    AllenRelation.DURING: AllenRelation.CONTAINS,
    AllenRelation.CONTAINS: AllenRelation.DURING,
    AllenRelation.FINISHES: AllenRelation.FINISHED_BY,
    AllenRelation.FINISHED_BY: AllenRelation.FINISHES,
    AllenRelation.EQUAL: AllenRelation.EQUAL,
}

# the seven base relations as surveyed; the rest are their inverses
BASE_RELATIONS = (
    AllenRelation.BEFORE,
    AllenRelation.EQUAL,
    AllenRelation.MEETS,
    AllenRelation.OVERLAPS,
    AllenRelation.DURING,
    AllenRelation.STARTS,
    AllenRelation.FINISHES,
)


def allen_relation(x: TimeInterval, y: TimeInterval) -> AllenRelation:
    """Classify the ordered pair (x, y) into exactly one Allen relation.

    Endpoint equalities are checked first so that zero-length intervals
    resolve purely by endpoint comparison.
    """
    if x.start == y.start and x.end == y.end:
        return AllenRelation.EQUAL
    if x.start == y.start:
        return AllenRelation.STARTS if x.end < y.end else AllenRelation.STARTED_BY
    if x.end == y.end:
        return AllenRelation.FINISHES if x.start > y.start else AllenRelation.FINISHED_BY
    if x.end == y.start:
        return AllenRelation.MEETS
    if x.start == y.end:
        return AllenRelation.MET_BY
    if x.end < y.start:
        return AllenRelation.BEFORE
    if x.start > y.end:
        return AllenRelation.AFTER
    if x.start > y.start and x.end < y.end:
        return AllenRelation.DURING
    if x.start < y.start and x.end > y.end:
        return AllenRelation.CONTAINS
    if x.start < y.start:
        return AllenRelation.OVERLAPS
    return AllenRelation.OVERLAPPED_BY


def temporal_overlap_ratio(x: TimeInterval, y: TimeInterval) -> float:
    """Jaccard overlap of two intervals on the time axis, in [0, 1].

    len(x ∩ y) / len(x ∪ y), where the union is measured as
    len(x) + len(y) − len(x ∩ y). Undefined (raises) when both intervals
    have zero length.
    """
    if x.length == 0.0 and y.length == 0.0:
        raise BothDegenerate("overlap ratio is undefined for two zero-length intervals")
    inter = x.intersection_length(y)
    union = x.length + y.length - inter
    return inter / union
