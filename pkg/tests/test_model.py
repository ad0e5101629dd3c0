import numpy as np
import pytest

from trajkit import (
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
from trajkit.distance import HAVERSINE
from trajkit.errors import (
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

from gen import rand_traj


class TestValidate:
    def test_valid_two_point_trajectory(self):
        t = validate(("a", [[0, 0], [1, 1]], [0, 1]))
        assert isinstance(t, Trajectory)
        assert len(t) == 2
        assert t.dimension == 2

    def test_equal_timestamps_rejected(self):
        with pytest.raises(NonIncreasingTime) as err:
            Trajectory("a", [[0, 0], [1, 1]], [1, 1])
        assert err.value.index == 1

    def test_decreasing_timestamps_rejected(self):
        with pytest.raises(NonIncreasingTime) as err:
            Trajectory("a", [0, 1, 2, 3], [0, 1, 0.5, 2])
        assert err.value.index == 2

    def test_empty_rejected(self):
        with pytest.raises(EmptyTrajectory):
            Trajectory("a", [], [])

    def test_idempotent_on_valid_trajectory(self):
        t = Trajectory("a", [[0, 0], [1, 1]], [0, 1])
        assert validate(t) is t

    def test_dimension_mismatch_reports_index(self):
        with pytest.raises(DimensionMismatch) as err:
            Trajectory("a", [[0, 0], [1, 1, 1], [2, 2]], [0, 1, 2])
        assert err.value.index == 1

    def test_non_finite_coordinate(self):
        with pytest.raises(NonFiniteValue) as err:
            Trajectory("a", [[0, 0], [np.nan, 1]], [0, 1])
        assert err.value.index == 1

    def test_negative_timestamp(self):
        with pytest.raises(NonFiniteValue) as err:
            Trajectory("a", [[0, 0], [1, 1]], [-1, 1])
        assert err.value.index == 0

    def test_from_points(self):
        t = Trajectory.from_points("a", [STPoint((0.0, 0.0), 0.0), STPoint((1.0, 1.0), 1.0)])
        assert len(t) == 2

    def test_arrays_are_read_only(self):
        t = Trajectory("a", [[0, 0], [1, 1]], [0, 1])
        with pytest.raises(ValueError):
            t.coords[0, 0] = 9.0


class TestDerivedQuantities:
    def test_time_span_endpoints(self):
        t = Trajectory("a", [0, 1, 2], [2, 5, 9])
        assert time_span(t) == TimeInterval(2, 9)

    def test_time_span_single_point(self):
        t = Trajectory("a", [0], [4])
        span = time_span(t)
        assert span == TimeInterval(4, 4)
        assert span.length == 0

    def test_time_span_two_points(self):
        assert time_span(Trajectory("a", [0, 1], [0, 1])) == TimeInterval(0, 1)

    def test_path_length_1d(self):
        assert path_length(Trajectory("a", [0, 3, 7], [0, 1, 2])) == 7

    def test_path_length_single_point(self):
        assert path_length(Trajectory("a", [5], [0])) == 0

    def test_path_length_345(self):
        assert path_length(Trajectory("a", [[0, 0], [3, 4]], [0, 1])) == 5

    def test_path_length_haversine_zero_for_static(self):
        t = Trajectory("a", [[8.5, 47.4], [8.5, 47.4 + 1e-12]], [0, 1])
        assert path_length(t, HAVERSINE) < 1.0

    def test_bounding_region(self):
        t = Trajectory("a", [[0, 0], [2, 1], [1, 3]], [0, 1, 2])
        assert bounding_region(t) == Region(0, 0, 2, 3)

    def test_bounding_region_degenerate(self):
        assert bounding_region(Trajectory("a", [[5, 5]], [0])) == Region(5, 5, 5, 5)

    def test_bounding_region_flat(self):
        t = Trajectory("a", [[-1, 0], [1, 0]], [0, 1])
        assert bounding_region(t) == Region(-1, 0, 1, 0)

    def test_bounding_region_needs_2d(self):
        with pytest.raises(DimensionUnsupported):
            bounding_region(Trajectory("a", [0, 1], [0, 1]))


class TestResample:
    def test_linear_midpoint(self):
        t = Trajectory("a", [0, 10], [0, 10])
        r = resample(t, 3)
        assert r.times.tolist() == [0, 5, 10]
        assert r.coords[:, 0].tolist() == [0, 5, 10]

    def test_identity_on_uniform_times(self):
        t = Trajectory("a", [[0, 0], [1, 2], [3, 1], [0, 0]], [0, 1, 2, 3])
        r = resample(t, 4)
        assert np.array_equal(r.coords, t.coords)
        assert np.array_equal(r.times, t.times)

    def test_piecewise_linear_values(self):
        # derived by hand: segments (0->4 over t 0..2), then constant 4
        t = Trajectory("a", [0, 4, 4], [0, 2, 4])
        r = resample(t, 5)
        assert r.coords[:, 0].tolist() == [0, 2, 4, 4, 4]
        assert r.times.tolist() == [0, 1, 2, 3, 4]

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            resample(Trajectory("a", [0], [0]), 3)

    def test_k_below_two(self):
        with pytest.raises(InvalidParameter):
            resample(Trajectory("a", [0, 1], [0, 1]), 1)

    def test_resample_never_lengthens(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            t = rand_traj(rng, n_points=int(rng.integers(2, 9)))
            k = int(rng.integers(2, 15))
            assert path_length(resample(t, k)) <= path_length(t) + 1e-9

    def test_resample_preserves_time_span(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            t = rand_traj(rng, n_points=int(rng.integers(2, 9)))
            assert time_span(resample(t, int(rng.integers(2, 15)))) == time_span(t)

    def test_bounding_region_contains_all_points(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            t = rand_traj(rng, n_points=int(rng.integers(1, 9)))
            region = bounding_region(t)
            assert all(region.contains_point(x, y) for x, y in t.coords)


class TestEnrichment:
    def test_context_length_must_match(self):
        t = Trajectory("a", [0, 1], [0, 1])
        with pytest.raises(LengthMismatch):
            EnrichedTrajectory(t, (ContextSample({"temp": 5.0}),))

    def test_episode_bounds_checked(self):
        t = Trajectory("a", [0, 1], [0, 1])
        with pytest.raises(IndexOutOfRange):
            EnrichedTrajectory(t, None, (SemanticEpisode("work", 0, 5),))

    def test_overlapping_episodes_rejected(self):
        t = Trajectory("a", list(range(7)), list(range(7)))
        with pytest.raises(OverlappingEpisodes):
            EnrichedTrajectory(
                t, None, (SemanticEpisode("x", 0, 4), SemanticEpisode("y", 3, 6))
            )

    def test_episodes_sorted_on_construction(self):
        t = Trajectory("a", list(range(7)), list(range(7)))
        e = EnrichedTrajectory(
            t, None, (SemanticEpisode("y", 5, 6), SemanticEpisode("x", 0, 4))
        )
        assert [ep.start for ep in e.episodes] == [0, 5]

    def test_enrich_helper_accepts_plain_tuples(self):
        t = Trajectory("a", [0, 1, 2], [0, 1, 2])
        e = enrich(t, [{"temp": 1.0}, {}, {"temp": 2.0}], [("work", 0, 1)])
        assert e.context[0].values == {"temp": 1.0}
        assert e.episodes[0].label == "work"

    def test_sharing_boundary_index_is_overlap(self):
        t = Trajectory("a", list(range(7)), list(range(7)))
        with pytest.raises(OverlappingEpisodes):
            EnrichedTrajectory(
                t, None, (SemanticEpisode("x", 0, 4), SemanticEpisode("y", 4, 6))
            )


class TestTypeInvariants:
    def test_stpoint_rejects_nan(self):
        with pytest.raises(NonFiniteValue):
            STPoint((float("nan"),), 0.0)

    def test_interval_rejects_reversed(self):
        with pytest.raises(InvalidParameter):
            TimeInterval(5, 2)

    def test_region_rejects_reversed(self):
        with pytest.raises(InvalidParameter):
            Region(2, 0, 0, 1)

    def test_episode_rejects_reversed(self):
        with pytest.raises(InvalidParameter):
            SemanticEpisode("x", 4, 2)
