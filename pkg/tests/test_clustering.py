import numpy as np
import pytest

from trajkit import (
    DistanceMatrix,
    NOISE,
    SimilarityConfig,
    Trajectory,
    agglomerative,
    as_distance_matrix,
    composite_distance_matrix,
    cut_dendrogram,
    dbscan,
    distance_matrix,
    dtw,
    enrich,
    k_medoids,
    resolve_sigma,
    silhouette,
)
from trajkit.errors import InvalidParameter, MetricPairError, TooFewClusters

from gen import rand_distance_matrix, rand_enriched, rand_traj, two_group_matrix
from oracles import (
    kmedoids_exhaustive,
    labels_to_partition,
    mst_edge_weights,
    silhouette_direct,
    threshold_components,
)


class TestDistanceMatrixType:
    def test_rejects_asymmetry(self):
        with pytest.raises(InvalidParameter):
            DistanceMatrix(("a", "b"), [[0, 1], [2, 0]])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(InvalidParameter):
            DistanceMatrix(("a", "b"), [[0, 1], [1, 0.5]])

    def test_rejects_negative(self):
        with pytest.raises(InvalidParameter):
            DistanceMatrix(("a", "b"), [[0, -1], [-1, 0]])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(InvalidParameter):
            DistanceMatrix(("a", "a"), [[0, 1], [1, 0]])

    def test_coercion_makes_ids(self):
        m = as_distance_matrix([[0, 1], [1, 0]])
        assert m.ids == ("0", "1")


class TestDistanceMatrixBuild:
    def test_identical_trajectories_zero_matrix(self):
        t = rand_traj(np.random.default_rng(0), "a", n_points=4)
        dataset = [
            enrich(Trajectory(str(i), t.coords, t.times)) for i in range(4)
        ]
        m = distance_matrix(dataset, "dtw")
        assert np.array_equal(m.values, np.zeros((4, 4)))

    def test_two_elements(self):
        rng = np.random.default_rng(1)
        t1, t2 = rand_traj(rng, "a", 3), rand_traj(rng, "b", 5)
        m = distance_matrix([t1, t2], "dtw")
        assert m.values[0, 1] == dtw(t1, t2)
        assert m.values[1, 0] == m.values[0, 1]

    def test_parallel_matches_sequential_bitwise(self):
        rng = np.random.default_rng(2)
        dataset = [rand_enriched(rng, f"t{i}", n_points=int(rng.integers(2, 7))) for i in range(16)]
        seq = distance_matrix(dataset, "dtw", jobs=1)
        par = distance_matrix(dataset, "dtw", jobs=3)
        assert np.array_equal(seq.values, par.values)

    def test_parallel_matches_sequential_composite(self):
        rng = np.random.default_rng(3)
        dataset = [rand_enriched(rng, f"t{i}", n_points=int(rng.integers(2, 6))) for i in range(10)]
        cfg = SimilarityConfig()
        seq, summary_seq = composite_distance_matrix(dataset, cfg, jobs=1)
        par, summary_par = composite_distance_matrix(dataset, cfg, jobs=2)
        assert np.array_equal(seq.values, par.values)
        assert summary_seq == summary_par
        assert 0 <= seq.values.max() <= 1.0

    def test_metric_errors_carry_both_ids(self):
        a = Trajectory("a", [[0, 0], [1, 1]], [0, 1])
        b = Trajectory("b", [0.0, 1.0], [0, 1])  # 1-D vs 2-D
        with pytest.raises(MetricPairError) as err:
            distance_matrix([a, b], "dtw")
        assert err.value.id_a == "a"
        assert err.value.id_b == "b"

    def test_lcss_metric_distances_within_unit_interval(self):
        rng = np.random.default_rng(4)
        dataset = [rand_enriched(rng, f"t{i}") for i in range(6)]
        m = distance_matrix(dataset, "lcss", SimilarityConfig(epsilon=2.0))
        assert (m.values >= 0).all() and (m.values <= 1).all()

    def test_needs_two_elements(self):
        with pytest.raises(InvalidParameter):
            distance_matrix([rand_traj(np.random.default_rng(5))])

    def test_duplicate_ids_rejected(self):
        rng = np.random.default_rng(6)
        with pytest.raises(InvalidParameter):
            distance_matrix([rand_traj(rng, "x"), rand_traj(rng, "x")])

    def test_resolve_sigma_median(self):
        rng = np.random.default_rng(7)
        dataset = [rand_enriched(rng, f"t{i}", n_points=3) for i in range(5)]
        cfg = resolve_sigma(dataset, SimilarityConfig(spatial_metric="dtw"))
        flat = []
        for i in range(5):
            for j in range(i + 1, 5):
                flat.append(dtw(dataset[i].trajectory, dataset[j].trajectory))
        assert cfg.sigma == pytest.approx(np.median(flat), abs=1e-12)


class TestDbscan:
    def test_two_well_separated_groups(self):
        rng = np.random.default_rng(10)
        values = two_group_matrix(rng, 6, 5)
        result = dbscan(values, eps=5.0, min_pts=2)
        assert result.k == 2
        assert result.noise_count == 0
        got, noise = labels_to_partition(result.labels)
        assert got == {frozenset(range(6)), frozenset(range(6, 11))}

    def test_all_zero_distances_single_cluster(self):
        result = dbscan(np.zeros((5, 5)), eps=1.0, min_pts=3)
        assert result.k == 1
        assert set(result.labels) == {0}

    def test_min_pts_above_n_all_noise(self):
        rng = np.random.default_rng(11)
        values = rand_distance_matrix(rng, 6)
        result = dbscan(values, eps=100.0, min_pts=7)
        assert result.k == 0
        assert set(result.labels) == {NOISE}

    def test_matches_component_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            values = rand_distance_matrix(rng, 20)
            eps = float(rng.uniform(0.5, 6.0))
            result = dbscan(values, eps, 2)
            expect_groups, expect_noise = threshold_components(values.tolist(), eps)
            got_groups, got_noise = labels_to_partition(result.labels)
            assert got_groups == expect_groups
            assert got_noise == expect_noise

    def test_core_partition_permutation_invariant(self):
        rng = np.random.default_rng(13)
        values = rand_distance_matrix(rng, 15)
        eps, min_pts = 3.0, 3
        base = dbscan(values, eps, min_pts)
        core = (values <= eps).sum(axis=1) >= min_pts
        base_partition = {
            frozenset(i for i in range(15) if core[i] and base.labels[i] == c)
            for c in range(base.k)
        } - {frozenset()}
        for seed in range(5):
            perm = np.random.default_rng(seed).permutation(15)
            shuffled = values[np.ix_(perm, perm)]
            res = dbscan(as_distance_matrix(shuffled), eps, min_pts)
            core_p = (shuffled <= eps).sum(axis=1) >= min_pts
            assert np.array_equal(core_p, core[perm])
            partition = {
                frozenset(int(perm[i]) for i in range(15) if core_p[i] and res.labels[i] == c)
                for c in range(res.k)
            } - {frozenset()}
            assert partition == base_partition

    def test_parameter_validation(self):
        values = np.zeros((3, 3))
        with pytest.raises(InvalidParameter):
            dbscan(values, eps=-1.0, min_pts=2)
        with pytest.raises(InvalidParameter):
            dbscan(values, eps=1.0, min_pts=0)


class TestAgglomerative:
    def test_two_elements_single_merge(self):
        m = as_distance_matrix([[0, 3.5], [3.5, 0]])
        dendro = agglomerative(m, "single")
        assert len(dendro.merges) == 1
        assert dendro.merges[0].height == 3.5
        assert dendro.merges[0].count == 2

    def test_three_point_forced_ordering(self):
        values = [[0, 1, 5], [1, 0, 5], [5, 5, 0]]
        dendro = agglomerative(as_distance_matrix(values), "single")
        assert list(dendro.heights) == [1, 5]
        assert (dendro.merges[0].left, dendro.merges[0].right) == (0, 1)

    def test_single_linkage_heights_equal_mst(self):
        rng = np.random.default_rng(20)
        for n in (5, 8, 12, 20):
            values = rand_distance_matrix(rng, n)
            dendro = agglomerative(as_distance_matrix(values), "single")
            assert np.allclose(sorted(dendro.heights), mst_edge_weights(values.tolist()), atol=1e-9)

    def test_heights_non_decreasing_all_linkages(self):
        rng = np.random.default_rng(21)
        for linkage in ("single", "complete", "average"):
            for _ in range(10):
                values = rand_distance_matrix(rng, 12)
                heights = agglomerative(as_distance_matrix(values), linkage).heights
                assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))

    def test_unknown_linkage(self):
        with pytest.raises(InvalidParameter):
            agglomerative(np.zeros((2, 2)), "ward")

    def test_tie_break_smallest_row_col(self):
        values = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
        dendro = agglomerative(as_distance_matrix(values), "single")
        assert (dendro.merges[0].left, dendro.merges[0].right) == (0, 1)


class TestCutDendrogram:
    def build(self, n=6, seed=30):
        values = rand_distance_matrix(np.random.default_rng(seed), n)
        return agglomerative(as_distance_matrix(values), "average")

    def test_k_equals_n_singletons(self):
        dendro = self.build()
        result = cut_dendrogram(dendro, k=6)
        assert result.k == 6
        assert sorted(result.labels) == list(range(6))

    def test_k_one_single_cluster(self):
        result = cut_dendrogram(self.build(), k=1)
        assert result.k == 1
        assert set(result.labels) == {0}

    def test_height_below_all_merges(self):
        dendro = self.build()
        result = cut_dendrogram(dendro, height=min(dendro.heights) / 2)
        assert result.k == 6

    def test_height_above_all_merges(self):
        dendro = self.build()
        result = cut_dendrogram(dendro, height=max(dendro.heights) + 1)
        assert result.k == 1

    def test_every_k_produces_exactly_k(self):
        dendro = self.build(n=9, seed=31)
        for k in range(1, 10):
            assert cut_dendrogram(dendro, k=k).k == k

    def test_exactly_one_selector(self):
        dendro = self.build()
        with pytest.raises(InvalidParameter):
            cut_dendrogram(dendro)
        with pytest.raises(InvalidParameter):
            cut_dendrogram(dendro, k=2, height=1.0)

    def test_labels_contiguous_by_smallest_member(self):
        dendro = self.build(n=7, seed=32)
        result = cut_dendrogram(dendro, k=3)
        first_seen = {}
        for i, label in enumerate(result.labels):
            first_seen.setdefault(label, i)
        assert sorted(first_seen, key=first_seen.get) == list(range(3))


class TestKMedoids:
    def test_k_equals_n_zero_cost(self):
        rng = np.random.default_rng(40)
        values = rand_distance_matrix(rng, 5)
        out = k_medoids(as_distance_matrix(values), k=5)
        assert out.cost == 0.0
        assert out.medoid_indices == (0, 1, 2, 3, 4)

    def test_k_one_is_argmin_of_total_distance(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            values = rand_distance_matrix(rng, 9)
            out = k_medoids(as_distance_matrix(values), k=1)
            expect = int(np.argmin(values.sum(axis=0)))
            assert out.medoid_indices == (expect,)

    def test_two_separated_groups_recovered(self):
        rng = np.random.default_rng(42)
        values = two_group_matrix(rng, 5, 7)
        out = k_medoids(as_distance_matrix(values), k=2)
        got, _ = labels_to_partition(out.result.labels)
        assert got == {frozenset(range(5)), frozenset(range(5, 12))}
        best_cost, _ = kmedoids_exhaustive(values.tolist(), 2)
        assert out.cost == pytest.approx(best_cost, abs=1e-9)

    def test_matches_exhaustive_search(self):
        rng = np.random.default_rng(43)
        for trial in range(25):
            n = int(rng.integers(4, 13))
            k = int(rng.integers(1, 4))
            values = rand_distance_matrix(rng, n)
            out = k_medoids(as_distance_matrix(values), k=k)
            best_cost, _ = kmedoids_exhaustive(values.tolist(), k)
            assert out.cost == pytest.approx(best_cost, abs=1e-9), f"trial {trial}"

    def test_deterministic(self):
        rng = np.random.default_rng(44)
        values = rand_distance_matrix(rng, 10)
        a = k_medoids(as_distance_matrix(values), k=3)
        b = k_medoids(as_distance_matrix(values), k=3)
        assert a.medoid_indices == b.medoid_indices
        assert a.result.labels == b.result.labels

    def test_parameter_validation(self):
        values = np.zeros((3, 3))
        with pytest.raises(InvalidParameter):
            k_medoids(values, k=0)
        with pytest.raises(InvalidParameter):
            k_medoids(values, k=4)

    def test_swap_never_worse_than_build_start(self):
        from trajkit.clustering import _pam_build, _pam_swap

        rng = np.random.default_rng(45)
        for _ in range(20):
            values = rand_distance_matrix(rng, 10)
            build = _pam_build(values, 3)
            build_cost = values[:, build].min(axis=1).sum()
            refined, cost = _pam_swap(values, list(build))
            assert cost <= build_cost + 1e-12
            out = k_medoids(as_distance_matrix(values), k=3, restarts=0)
            assert out.medoid_indices == tuple(refined)
            assert out.cost == pytest.approx(cost, abs=1e-12)

    def test_converged_solution_is_one_swap_optimal(self):
        rng = np.random.default_rng(46)
        values = rand_distance_matrix(rng, 11)
        out = k_medoids(as_distance_matrix(values), k=3)
        meds = list(out.medoid_indices)
        for m in meds:
            for h in range(11):
                if h in meds:
                    continue
                trial = sorted([x for x in meds if x != m] + [h])
                assert values[:, trial].min(axis=1).sum() >= out.cost - 1e-12


class TestSilhouette:
    def test_separated_clusters_close_to_one(self):
        rng = np.random.default_rng(50)
        values = two_group_matrix(rng, 6, 6, intra=1.0, inter=100.0)
        labels = [0] * 6 + [1] * 6
        score = silhouette(as_distance_matrix(values), labels)
        assert score > 0.9
        assert score == pytest.approx(silhouette_direct(values.tolist(), labels), abs=1e-12)

    def test_equidistant_points_score_zero(self):
        values = np.ones((4, 4)) - np.eye(4)
        assert silhouette(as_distance_matrix(values), [0, 0, 1, 1]) == 0.0

    def test_swapped_labels_negative(self):
        rng = np.random.default_rng(51)
        values = two_group_matrix(rng, 5, 5, intra=1.0, inter=100.0)
        labels = [0, 0, 1, 1, 1, 1, 1, 0, 0, 0]  # deliberately crossed
        score = silhouette(as_distance_matrix(values), labels)
        assert score < 0
        assert score == pytest.approx(silhouette_direct(values.tolist(), labels), abs=1e-12)

    def test_noise_excluded(self):
        rng = np.random.default_rng(52)
        values = two_group_matrix(rng, 4, 4)
        labels = [0, 0, 0, NOISE, 1, 1, 1, NOISE]
        score = silhouette(as_distance_matrix(values), labels)
        kept = [i for i, l in enumerate(labels) if l != NOISE]
        sub = values[np.ix_(kept, kept)]
        assert score == pytest.approx(
            silhouette_direct(sub.tolist(), [labels[i] for i in kept]), abs=1e-12
        )

    def test_matches_sklearn_when_available(self):
        sk = pytest.importorskip("sklearn.metrics")
        rng = np.random.default_rng(53)
        values = rand_distance_matrix(rng, 12)
        labels = [0, 1, 2] * 4
        ours = silhouette(as_distance_matrix(values), labels)
        theirs = sk.silhouette_score(values, labels, metric="precomputed")
        assert ours == pytest.approx(theirs, abs=1e-9)

    def test_too_few_clusters(self):
        with pytest.raises(TooFewClusters):
            silhouette(np.zeros((3, 3)), [0, 0, 0])

    def test_planted_two_clusters_recovered_by_all_three(self):
        rng = np.random.default_rng(54)
        values = two_group_matrix(rng, 6, 6, intra=1.0, inter=50.0)
        matrix = as_distance_matrix(values)
        expected = {frozenset(range(6)), frozenset(range(6, 12))}
        assert labels_to_partition(dbscan(matrix, 3.0, 2).labels)[0] == expected
        agg = cut_dendrogram(agglomerative(matrix, "single"), k=2)
        assert labels_to_partition(agg.labels)[0] == expected
        km = k_medoids(matrix, 2)
        assert labels_to_partition(km.result.labels)[0] == expected
