"""Exception hierarchy for the toolkit.

Everything raised on purpose derives from :class:`TrajkitError`, so callers
can catch a single type at an application boundary. Errors that point at a
specific sample, row, or trajectory carry that location as an attribute.
"""


class TrajkitError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------------------
# trajectory / model validation


class EmptyTrajectory(TrajkitError):
    """A trajectory must contain at least one point."""


class NonIncreasingTime(TrajkitError):
    """Timestamps must strictly increase along a trajectory."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"timestamp at index {index} does not strictly increase")


class DimensionMismatch(TrajkitError):
    """Spatial dimensions disagree (within one trajectory or between two)."""

    def __init__(self, index: int | None = None, message: str | None = None):
        self.index = index
        if message is None:
            where = "" if index is None else f" at index {index}"
            message = f"spatial dimension mismatch{where}"
        super().__init__(message)


class NonFiniteValue(TrajkitError):
    """A coordinate or timestamp is NaN, infinite, or outside its domain."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"non-finite or out-of-domain value at index {index}")


class DimensionUnsupported(TrajkitError):
    """The operation is only defined for a specific spatial dimension."""


class TooFewPoints(TrajkitError):
    """The operation needs more points than the trajectory has."""


# ---------------------------------------------------------------------------
# temporal / spatial relations


class BothDegenerate(TrajkitError):
    """Overlap ratio is undefined when both intervals have zero length."""


class DegenerateRegion(TrajkitError):
    """Topological relations require regions with positive area."""


# ---------------------------------------------------------------------------
# similarity


class LengthMismatch(TrajkitError):
    """Lock-step comparison requires equal point counts."""


class NoContext(TrajkitError):
    """Contextual similarity requires a context series on both trajectories."""


class NoSharedSchema(TrajkitError):
    """The two context series have no context key in common."""


class EmptyMatchSet(TrajkitError):
    """Continuity is undefined for an empty match set."""


class InvalidConfig(TrajkitError):
    """A similarity configuration value is out of range or inconsistent."""


class WeightSimplexViolation(InvalidConfig):
    """Dimension weights must be non-negative and sum to one."""


# ---------------------------------------------------------------------------
# clustering


class InvalidParameter(TrajkitError):
    """A parameter or operand fails the operation's precondition."""


class TooFewClusters(TrajkitError):
    """Silhouette needs at least two non-noise clusters."""


class MetricPairError(TrajkitError):
    """A pairwise metric failed while building a distance matrix."""

    def __init__(self, id_a: str, id_b: str, cause: Exception):
        self.id_a = id_a
        self.id_b = id_b
        super().__init__(f"metric failed for pair ({id_a}, {id_b}): {cause}")


# ---------------------------------------------------------------------------
# ingestion / configuration


class ParseError(TrajkitError):
    """A file row could not be parsed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(TrajkitError):
    """A parsed trajectory failed model validation."""

    def __init__(self, traj_id: str, detail: Exception | str):
        self.traj_id = traj_id
        self.detail = detail
        super().__init__(f"trajectory {traj_id!r}: {detail}")


class UnknownKey(TrajkitError):
    """A context row uses a key absent from the declared schema."""


class IndexOutOfRange(TrajkitError):
    """A context or semantic row references a point index past the end."""


class OverlappingEpisodes(TrajkitError):
    """Semantic episodes of one trajectory overlap on point indices."""

    def __init__(self, traj_id: str, message: str | None = None):
        self.traj_id = traj_id
        super().__init__(message or f"trajectory {traj_id!r} has overlapping episodes")


class UnknownOption(TrajkitError):
    """The configuration file names an option that does not exist."""


class InvalidValue(TrajkitError):
    """A configuration or context value cannot be interpreted."""
