import numpy as np
import pytest
from django.core.exceptions import ValidationError
from scipy.stats import ortho_group

from blockmodels.generators import generate
from blockmodels.population import population_matrix
from blockmodels.specs import DcScbmSpec, ScbmSpec, four_parameter_spec, simulation_1_spec, simulation_3_spec
from graph.sparse import from_dense
from metrics.misclustering import misclustering_rate
from randsvd.factors import ExactConfig, ProjectionConfig, SamplingConfig
from .kmeans import lloyd_kmeans, repair_empty
from .kmedian import DROPPED, geometric_median, spherical_kmedian
from .pipeline import KMEANS, SPHERICAL_KMEDIAN, co_cluster


def planted_wells(seed, per_cluster=4, k=3, spread=0.1):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])[:k]
    truth = np.repeat(np.arange(k), per_cluster)
    X = centers[truth] + spread * rng.standard_normal((k * per_cluster, 2))
    return X, truth


def brute_force_kmeans_objective(X, k):
    """Mínimo de la suma de cuadrados sobre todas las asignaciones (k^m)."""
    m = len(X)
    labels = np.indices((k,) * m, dtype=np.int8).reshape(m, -1).T
    explained = np.zeros(len(labels))
    for cluster in range(k):
        mask = (labels == cluster).astype(np.float64)
        counts = mask.sum(axis=1)
        squared = ((mask @ X) ** 2).sum(axis=1)
        explained += np.divide(squared, counts, out=np.zeros_like(counts), where=counts > 0)
    return float((X ** 2).sum() - explained.max())


def assert_non_increasing(history):
    steps = np.diff(np.asarray(history))
    assert np.all(steps <= 1e-9)


def random_sizes(rng, n, k):
    cuts = np.sort(rng.choice(np.arange(1, n // 5), size=k - 1, replace=False)) * 5
    return np.diff(np.concatenate([[0], cuts, [n]])).astype(int).tolist()


def random_population_spec(seed, degree_corrected):
    """ScBM (o DC-ScBM) al azar con Ky >= 2 y columnas de B distintas."""
    rng = np.random.default_rng(seed)
    ky = int(rng.integers(2, 4))
    kz = int(rng.integers(ky, 5))
    n = int(rng.integers(12, 60)) * 5
    spec = ScbmSpec(n=n, ky=ky, kz=kz, b=rng.uniform(0.05, 0.6, size=(ky, kz)),
                    row_sizes=random_sizes(rng, n, ky), col_sizes=random_sizes(rng, n, kz)).check_rank()
    if not degree_corrected:
        return spec
    memberships = spec.memberships()
    thetas = []
    for labels, k in ((memberships.y, ky), (memberships.z, kz)):
        theta = rng.uniform(0.2, 1.0, size=n)
        for cluster in range(k):
            theta[labels == cluster] /= theta[labels == cluster].max()
        thetas.append(theta)
    return DcScbmSpec(base=spec, theta_y=thetas[0], theta_z=thetas[1])


class TestLloydKmeans:
    def test_repeated_rows_are_grouped_exactly(self):
        rows = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 3.0]])
        truth = np.array([0, 1, 2] * 5)
        result = lloyd_kmeans(rows[truth], 3, seed=0)
        assert result.objective == pytest.approx(0.0, abs=1e-12)
        assert misclustering_rate(result.labels, truth, 3) == 0.0

    def test_single_cluster_center_is_mean(self):
        X = np.random.default_rng(1).standard_normal((20, 3))
        result = lloyd_kmeans(X, 1, seed=0)
        assert np.allclose(result.centers[0], X.mean(axis=0))
        assert np.all(result.labels == 0)

    def test_matches_brute_force(self):
        X, truth = planted_wells(seed=4)
        result = lloyd_kmeans(X, 3, seed=2)
        assert result.objective == pytest.approx(brute_force_kmeans_objective(X, 3), abs=1e-9)
        assert misclustering_rate(result.labels, truth, 3) == 0.0

    def test_objective_never_increases(self):
        X = np.random.default_rng(5).standard_normal((200, 3))
        result = lloyd_kmeans(X, 5, seed=1)
        assert_non_increasing(result.history)
        assert result.objective == result.history[-1]

    def test_rotation_invariance(self):
        X = np.random.default_rng(6).standard_normal((150, 4))
        rotation = ortho_group.rvs(4, random_state=0)
        plain = lloyd_kmeans(X, 4, seed=3)
        rotated = lloyd_kmeans(X @ rotation, 4, seed=3)
        assert rotated.objective == pytest.approx(plain.objective, abs=1e-9)

    def test_seeded(self):
        X = np.random.default_rng(7).standard_normal((100, 2))
        first = lloyd_kmeans(X, 3, seed=11)
        second = lloyd_kmeans(X, 3, seed=11)
        assert np.array_equal(first.labels, second.labels)
        assert first.objective == second.objective

    def test_requires_enough_rows(self):
        with pytest.raises(ValidationError):
            lloyd_kmeans(np.zeros((2, 2)), 3, seed=0)
        with pytest.raises(ValidationError):
            lloyd_kmeans(np.array([[np.nan, 0.0], [1.0, 1.0]]), 1, seed=0)

    def test_repair_uses_farthest_points(self):
        X = np.array([[0.0], [1.0], [5.0], [9.0]])
        centers = np.array([[0.0], [100.0], [200.0]])
        labels = np.zeros(4, dtype=np.int64)
        distances = (X[:, 0] - 0.0) ** 2
        repaired = repair_empty(X, centers.copy(), labels, distances)
        assert repaired[:, 0].tolist() == [0.0, 9.0, 5.0]


class TestSphericalKmedian:
    def test_orthogonal_directions_with_mixed_scales(self):
        X = np.array([[1.0, 0.0], [5.0, 0.0], [0.2, 0.0], [0.0, 3.0], [0.0, 0.1], [0.0, 7.0]])
        result = spherical_kmedian(X, 2, seed=0)
        assert result.objective == pytest.approx(0.0, abs=1e-10)
        assert misclustering_rate(result.labels, np.array([0, 0, 0, 1, 1, 1]), 2) == 0.0

    def test_zero_row_gets_random_label(self):
        X = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 4.0]])
        result = spherical_kmedian(X, 2, seed=3)
        assert result.n_zero_rows == 1
        assert result.labels[3] in (0, 1)
        assert result.labels[0] == result.labels[1] != result.labels[2] == result.labels[4]

    def test_zero_row_label_is_seeded(self):
        X = np.vstack([np.eye(2), np.zeros((6, 2))])
        first = spherical_kmedian(X, 2, seed=8)
        assert np.array_equal(first.labels, spherical_kmedian(X, 2, seed=8).labels)

    def test_dropped_zero_rows_keep_sentinel(self):
        X = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 4.0], [0.0, 0.0]])
        result = spherical_kmedian(X, 2, seed=3, zero_rows='drop')
        assert result.n_zero_rows == 2
        assert result.labels[3] == result.labels[5] == DROPPED
        assert result.labels[0] == result.labels[1] != result.labels[2] == result.labels[4]
        assert set(result.labels[[0, 1, 2, 4]].tolist()) == {0, 1}

    def test_drop_does_not_move_other_labels(self):
        X = np.vstack([np.eye(3), np.zeros((2, 3)), 2 * np.eye(3)])
        randomized = spherical_kmedian(X, 3, seed=5)
        dropped = spherical_kmedian(X, 3, seed=5, zero_rows='drop')
        kept = np.r_[0:3, 5:8]
        assert np.array_equal(randomized.labels[kept], dropped.labels[kept])

    def test_unknown_zero_rows_mode(self):
        with pytest.raises(ValidationError):
            spherical_kmedian(np.eye(2), 2, seed=0, zero_rows='keep')

    def test_needs_k_nonzero_rows(self):
        X = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValidationError):
            spherical_kmedian(X, 2, seed=0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        directions = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        X = np.repeat(directions, 5, axis=0) + 0.15 * rng.standard_normal((10, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        result = spherical_kmedian(X, 2, seed=1)
        best = np.inf
        for mask in range(1, 2 ** 10 - 1):
            groups = np.array([(mask >> i) & 1 for i in range(10)], dtype=bool)
            total = geometric_median(X[groups])[1] + geometric_median(X[~groups])[1]
            best = min(best, total)
        assert result.objective <= best + 1e-6
        assert_non_increasing(result.history)


class TestGeometricMedian:
    def test_symmetric_points(self):
        square = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
        median, value = geometric_median(square)
        assert np.allclose(median, [1.0, 1.0])
        assert value == pytest.approx(4 * np.sqrt(2))

    def test_improves_on_centroid(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [10.0, 10.0]])
        centroid = points.mean(axis=0)
        _, value = geometric_median(points)
        assert value < np.linalg.norm(points - centroid, axis=1).sum()

    def test_keeps_better_start(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [10.0, 10.0]])
        optimum, value = geometric_median(points, max_iter=500, tol=1e-14)
        median, again = geometric_median(points, start=optimum, max_iter=1)
        assert again <= value
        assert np.allclose(median, optimum)


class TestCoCluster:
    def test_population_recovery_with_kmeans(self):
        spec = simulation_1_spec(90)
        graph = from_dense(population_matrix(spec))
        result = co_cluster(graph, 3, 3, config=ExactConfig(rank=3), method=KMEANS, seed=0)
        truth = spec.memberships()
        assert misclustering_rate(result.row_labels, truth.y, 3) == 0.0
        assert misclustering_rate(result.col_labels, truth.z, 3) == 0.0
        assert result.diagnostics['row_objective'] < 1e-10

    def test_population_recovery_with_kmedian(self):
        spec = simulation_3_spec(90, seed=4)
        graph = from_dense(population_matrix(spec))
        result = co_cluster(graph, 2, 3, config=ExactConfig(rank=2), method=SPHERICAL_KMEDIAN, seed=0)
        truth = spec.memberships()
        assert misclustering_rate(result.row_labels, truth.y, 2) == 0.0
        assert misclustering_rate(result.col_labels, truth.z, 3) == 0.0

    @pytest.mark.parametrize('seed', range(50))
    def test_population_recovery_on_random_specs(self, seed):
        cases = [
            (random_population_spec(seed, degree_corrected=False), KMEANS),
            (random_population_spec(seed, degree_corrected=False), SPHERICAL_KMEDIAN),
            (random_population_spec(1000 + seed, degree_corrected=True), SPHERICAL_KMEDIAN),
        ]
        for spec, method in cases:
            graph = from_dense(population_matrix(spec))
            result = co_cluster(graph, spec.ky, spec.kz, config=ExactConfig(rank=spec.ky), method=method, seed=seed)
            truth = spec.memberships()
            assert misclustering_rate(result.row_labels, truth.y, spec.ky) == 0.0
            assert misclustering_rate(result.col_labels, truth.z, spec.kz) == 0.0

    def test_drop_zero_rows_of_silent_nodes(self):
        spec = simulation_3_spec(90, seed=4)
        P = population_matrix(spec)
        P[-3:] = 0.0
        P[:, -2:] = 0.0
        result = co_cluster(from_dense(P), 2, 3, config=ExactConfig(rank=2), method=SPHERICAL_KMEDIAN, seed=0,
                            zero_rows='drop')
        truth = spec.memberships()
        assert result.row_labels[-3:].tolist() == [DROPPED] * 3
        assert result.col_labels[-2:].tolist() == [DROPPED] * 2
        assert misclustering_rate(result.row_labels[:-3], truth.y[:-3], 2) == 0.0
        assert misclustering_rate(result.col_labels[:-2], truth.z[:-2], 3) == 0.0
        assert result.diagnostics['row_zero_rows'] == 3
        assert result.diagnostics['col_zero_rows'] == 2

    def test_drop_requires_kmedian(self):
        graph, _ = generate(simulation_1_spec(30), seed=0)
        with pytest.raises(ValidationError):
            co_cluster(graph, 3, 3, method=KMEANS, zero_rows='drop')

    def test_factors_have_ky_columns(self):
        graph, _ = generate(four_parameter_spec(120, 2, 0.4, 0.5), seed=1)
        result = co_cluster(graph, 2, 3, config=ProjectionConfig(rank=5, seed=1), seed=2)
        assert result.svd.U.shape == (120, 2)
        assert result.svd.V.shape == (120, 2)
        assert set(result.col_labels.tolist()) <= {0, 1, 2}
        assert result.backend == 'projection'

    def test_recovers_planted_clusters(self):
        spec = four_parameter_spec(600, 3, 0.5, 0.6)
        graph, truth = generate(spec, seed=3)
        result = co_cluster(graph, 3, 3, config=ProjectionConfig(rank=3, seed=3), seed=3)
        assert misclustering_rate(result.row_labels, truth.y, 3) < 0.05
        assert misclustering_rate(result.col_labels, truth.z, 3) < 0.05

    def test_full_rate_sampling_equals_exact(self):
        graph, _ = generate(simulation_1_spec(150), seed=6)
        exact = co_cluster(graph, 3, 3, config=ExactConfig(rank=3), seed=4)
        sampled = co_cluster(graph, 3, 3, config=SamplingConfig(rank=3, p=1.0, seed=9), seed=4)
        assert np.array_equal(exact.row_labels, sampled.row_labels)
        assert np.array_equal(exact.col_labels, sampled.col_labels)

    def test_deterministic_with_diagnostics(self):
        graph, _ = generate(simulation_1_spec(120), seed=2)
        first = co_cluster(graph, 3, 3, config=ProjectionConfig(rank=3, seed=5), seed=1)
        second = co_cluster(graph, 3, 3, config=ProjectionConfig(rank=3, seed=5), seed=1)
        assert np.array_equal(first.row_labels, second.row_labels)
        assert np.array_equal(first.col_labels, second.col_labels)
        assert len(first.diagnostics['sigma']) == 3
        assert set(first.diagnostics['timings']) == {'svd_ms', 'row_cluster_ms', 'col_cluster_ms', 'total_ms'}

    def test_validation(self):
        graph, _ = generate(simulation_1_spec(30), seed=0)
        with pytest.raises(ValidationError):
            co_cluster(graph, 3, 2)
        with pytest.raises(ValidationError):
            co_cluster(graph, 2, 2, method='dbscan')
        with pytest.raises(ValidationError):
            co_cluster(graph, 2, 31)
