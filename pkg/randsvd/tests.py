import time

import numpy as np
import pytest
import scipy.linalg
from django.core.exceptions import ValidationError

from blockmodels.generators import generate
from blockmodels.population import population_matrix
from blockmodels.specs import four_parameter_spec, simulation_1_spec
from core.exceptions import DegenerateSketchError
from graph.sparse import SparseDirectedGraph, from_dense, to_dense
from metrics.norms import approximation_error, spectral_norm, subspace_distance
from . import projection
from .backends import EXACT, PROJECTION, SAMPLING, backend_name, compute_factors, make_config
from .factors import ExactConfig, ProjectionConfig, SamplingConfig, fix_signs
from .iterative import block_size, iterative_partial_svd
from .projection import projection_svd
from .sampling import sampling_svd, sparsify
from .scree import eigengap, leading_singular_values


def low_rank_graph(n, k, seed):
    """Grafo ponderado con adyacencia de rango exacto k."""
    rng = np.random.default_rng(seed)
    dense = rng.uniform(0.1, 1.0, size=(n, k)) @ rng.uniform(0.1, 1.0, size=(k, n))
    return from_dense(dense), dense


def scbm_graph(n=150, seed=0):
    graph, memberships = generate(simulation_1_spec(n), seed=seed)
    return graph, memberships


def assert_orthonormal(matrix):
    assert np.allclose(matrix.T @ matrix, np.eye(matrix.shape[1]), atol=1e-10)


class TestConfigs:
    def test_projection_rejects_negative_parameters(self):
        with pytest.raises(ValidationError):
            ProjectionConfig(rank=2, oversample_r=-1)
        with pytest.raises(ValidationError):
            ProjectionConfig(rank=2, power_q=-1)
        with pytest.raises(ValidationError):
            ProjectionConfig(rank=0)

    def test_projection_size_check(self):
        graph, _ = low_rank_graph(15, 2, seed=0)
        with pytest.raises(ValidationError):
            projection_svd(graph, ProjectionConfig(rank=6, oversample_r=10, oversample_s=2))

    def test_sampling_rate_range(self):
        with pytest.raises(ValidationError):
            SamplingConfig(rank=2, p=0.0)
        with pytest.raises(ValidationError):
            SamplingConfig(rank=2, p=1.5)

    def test_make_config_and_backend_name(self):
        assert isinstance(make_config(EXACT, 3), ExactConfig)
        projection_config = make_config(PROJECTION, 3, seed=4, power_q=1)
        assert projection_config.power_q == 1
        assert projection_config.seed == 4
        assert make_config(SAMPLING, 3, sample_p=0.5).p == 0.5
        for name in (EXACT, PROJECTION, SAMPLING):
            assert backend_name(make_config(name, 2)) == name
        with pytest.raises(ValidationError):
            make_config('lanczos', 3)


class TestIterative:
    def test_block_size(self):
        assert block_size(1000, 3) == 16
        assert block_size(10, 3) == 10

    def test_matches_dense_svd_on_low_rank(self):
        graph, dense = low_rank_graph(120, 3, seed=1)
        factors = iterative_partial_svd(graph, 3)
        U, s, Vt = scipy.linalg.svd(dense)
        assert factors.converged
        assert np.allclose(factors.sigma, s[:3], rtol=1e-8)
        assert subspace_distance(factors.U, U[:, :3]) < 1e-8
        assert subspace_distance(factors.V, Vt[:3].T) < 1e-8
        assert np.linalg.norm(factors.reconstruct() - dense) <= 1e-8 * s[0]

    def test_leading_values_of_generic_graph(self):
        graph, _ = scbm_graph(150, seed=2)
        factors = iterative_partial_svd(graph, 3)
        expected = scipy.linalg.svd(to_dense(graph), compute_uv=False)[:3]
        assert factors.sigma == pytest.approx(expected, rel=1e-5)
        assert np.all(np.diff(factors.sigma) <= 0)
        assert_orthonormal(factors.U)
        assert_orthonormal(factors.V)

    def test_is_deterministic(self):
        graph, _ = scbm_graph(120, seed=3)
        first = iterative_partial_svd(graph, 3)
        second = iterative_partial_svd(graph, 3)
        assert np.array_equal(first.U, second.U)
        assert np.array_equal(first.sigma, second.sigma)

    def test_reports_non_convergence(self):
        graph, _ = scbm_graph(120, seed=3)
        factors = iterative_partial_svd(graph, 3, max_iter=1)
        assert not factors.converged
        assert factors.iterations == 1

    def test_diagonal_graph(self):
        factors = iterative_partial_svd(from_dense(np.diag([3.0, 2.0, 1.0])), 3)
        assert factors.converged
        assert factors.sigma == pytest.approx([3.0, 2.0, 1.0], rel=1e-12)
        assert np.allclose(factors.U, np.eye(3), atol=1e-12)
        assert np.allclose(factors.V, np.eye(3), atol=1e-12)

    def test_empty_graph(self):
        factors = iterative_partial_svd(SparseDirectedGraph.empty(8), 2)
        assert factors.converged
        assert factors.sigma.tolist() == [0.0, 0.0]
        assert_orthonormal(factors.U)
        assert_orthonormal(factors.V)

    def test_rank_range(self):
        graph, _ = low_rank_graph(10, 2, seed=0)
        with pytest.raises(ValidationError):
            iterative_partial_svd(graph, 11)


class TestProjection:
    def test_exact_on_low_rank_graphs(self):
        for seed in range(20):
            n = 40 + 8 * seed
            k = 1 + seed % 4
            graph, dense = low_rank_graph(n, k, seed)
            factors = projection_svd(graph, ProjectionConfig(rank=k, seed=seed))
            assert np.linalg.norm(factors.reconstruct() - dense) <= 1e-8

    def test_without_power_iterations(self):
        graph, dense = low_rank_graph(80, 2, seed=7)
        factors = projection_svd(graph, ProjectionConfig(rank=2, power_q=0, oversample_r=0, oversample_s=0))
        assert np.linalg.norm(factors.reconstruct() - dense) <= 1e-8

    def test_full_rank_without_oversampling_matches_dense_svd(self):
        graph, _ = scbm_graph(45, seed=8)
        dense = to_dense(graph)
        factors = projection_svd(graph, ProjectionConfig(rank=45, oversample_r=0, oversample_s=0, power_q=0))
        assert np.abs(factors.reconstruct() - dense).max() <= 1e-10
        assert np.allclose(factors.sigma, scipy.linalg.svdvals(dense), atol=1e-10)

    def test_power_iterations_reduce_error(self):
        spec = simulation_1_spec(300)
        P = population_matrix(spec)
        errors = {0: [], 2: []}
        for seed in range(20):
            graph, _ = generate(spec, seed=seed)
            for power_q in errors:
                factors = projection_svd(graph, ProjectionConfig(rank=3, power_q=power_q, seed=seed))
                errors[power_q].append(approximation_error(factors, P))
        assert np.mean(errors[2]) <= np.mean(errors[0])

    def test_empty_graph_is_not_a_breakdown(self):
        factors = projection_svd(SparseDirectedGraph.empty(12), ProjectionConfig(rank=2, oversample_r=2,
                                                                                 oversample_s=2))
        assert factors.sigma.tolist() == [0.0, 0.0]
        assert_orthonormal(factors.U)
        assert_orthonormal(factors.V)

    def test_factor_shapes_and_order(self):
        graph, _ = scbm_graph(150, seed=4)
        factors = projection_svd(graph, ProjectionConfig(rank=3, seed=1))
        assert factors.U.shape == (150, 3)
        assert factors.V.shape == (150, 3)
        assert np.all(np.diff(factors.sigma) <= 0)
        assert np.all(factors.sigma >= 0)
        assert_orthonormal(factors.U)
        assert_orthonormal(factors.V)

    def test_seeded(self):
        graph, _ = scbm_graph(150, seed=4)
        first = projection_svd(graph, ProjectionConfig(rank=3, seed=9))
        again = projection_svd(graph, ProjectionConfig(rank=3, seed=9))
        other = projection_svd(graph, ProjectionConfig(rank=3, seed=10))
        assert np.array_equal(first.U, again.U)
        assert np.array_equal(first.V, again.V)
        assert not np.array_equal(first.U, other.U)

    def test_close_to_exact_leading_values(self):
        graph, _ = scbm_graph(300, seed=5)
        exact = iterative_partial_svd(graph, 1)
        approx = projection_svd(graph, ProjectionConfig(rank=1, seed=0))
        assert approx.sigma[0] == pytest.approx(exact.sigma[0], rel=1e-3)

    def test_retries_once_then_fails(self, monkeypatch):
        graph, _ = low_rank_graph(40, 2, seed=0)
        calls = []
        original = projection._project

        def flaky(graph, config, rng):
            calls.append(rng)
            if len(calls) == 1:
                raise projection._SketchBreakdown('sketch con entradas no finitas')
            return original(graph, config, rng)

        monkeypatch.setattr(projection, '_project', flaky)
        assert projection_svd(graph, ProjectionConfig(rank=2)).rank == 2
        assert len(calls) == 2

        def broken(graph, config, rng):
            raise projection._SketchBreakdown('QR con entradas no finitas')

        monkeypatch.setattr(projection, '_project', broken)
        with pytest.raises(DegenerateSketchError):
            projection_svd(graph, ProjectionConfig(rank=2))


class TestSampling:
    def test_full_rate_keeps_graph(self):
        graph, _ = scbm_graph(100, seed=1)
        assert sparsify(graph, 1.0, seed=3) == graph

    def test_values_are_rescaled(self):
        graph, _ = scbm_graph(150, seed=1)
        sampled = sparsify(graph, 0.5, seed=2)
        assert np.all(sampled.values == 2.0)
        assert 0.4 * graph.nnz < sampled.nnz < 0.6 * graph.nnz
        # sólo se conservan aristas existentes
        assert np.all(to_dense(graph)[to_dense(sampled) > 0] == 1.0)

    def test_seeded(self):
        graph, _ = scbm_graph(100, seed=1)
        assert sparsify(graph, 0.7, seed=5) == sparsify(graph, 0.7, seed=5)
        assert sparsify(graph, 0.7, seed=5) != sparsify(graph, 0.7, seed=6)

    def test_empty_graph(self):
        assert sparsify(SparseDirectedGraph.empty(5), 0.3, seed=0).nnz == 0

    def test_unbiased(self):
        graph, _ = scbm_graph(200, seed=6)
        dense = to_dense(graph)
        p, seeds = 0.7, 200
        mean = sum(to_dense(sparsify(graph, p, seed)) for seed in range(seeds)) / seeds
        band = 4 * np.sqrt(p * (1 - p) / seeds) / p
        edges = dense > 0
        assert np.all(mean[~edges] == 0.0)
        outside = np.abs(mean[edges] - 1.0) > band
        # ~5000 aristas: a 4 sigma se esperan menos de una por azar
        assert outside.sum() <= 3
        assert mean[edges].mean() == pytest.approx(1.0, abs=0.01)

    def test_subspace_within_wedin_bound(self):
        spec = four_parameter_spec(600, 3, 0.5, 0.6)
        P = population_matrix(spec)
        U, _, Vt = scipy.linalg.svd(P)
        for seed in range(5):
            graph, _ = generate(spec, seed=seed)
            config = SamplingConfig(rank=3, p=0.7, seed=seed)
            factors = sampling_svd(graph, config)
            noise = spectral_norm(to_dense(sparsify(graph, config.p, config.seed)) - P)
            bound = min(1.0, noise / factors.sigma[-1])
            assert subspace_distance(factors.U, U[:, :3]) <= bound
            assert subspace_distance(factors.V, Vt[:3].T) <= bound

    def test_full_rate_matches_iterative(self):
        for seed in range(20):
            graph, _ = scbm_graph(90, seed=seed)
            sampled = sampling_svd(graph, SamplingConfig(rank=3, p=1.0, seed=seed))
            exact = iterative_partial_svd(graph, 3)
            assert subspace_distance(sampled.U, exact.U) < 1e-6
            assert subspace_distance(sampled.V, exact.V) < 1e-6


class TestScree:
    def test_leading_values_are_clipped_to_n(self):
        values = leading_singular_values(from_dense(np.diag([1.0, 3.0, 2.0])), 10)
        assert values == pytest.approx([3.0, 2.0, 1.0], rel=1e-12)

    def test_eigengap(self):
        assert eigengap([5.0, 4.9, 1.0, 0.9]) == 2
        assert eigengap([0.9, 5.0, 1.0, 4.9]) == 2
        assert eigengap([10.0, 4.0, 3.9, 0.1]) == 1
        assert eigengap([10.0, 4.0, 3.9, 0.1], max_k=1) == 1
        assert eigengap([9.0, 8.0, 2.0, 0.0], max_k=2) == 2

    def test_ties_pick_smallest_k(self):
        assert eigengap([3.0, 2.0, 1.0]) == 1

    def test_validation(self):
        with pytest.raises(ValidationError):
            eigengap([1.0])
        with pytest.raises(ValidationError):
            leading_singular_values(from_dense(np.eye(3)), 0)


@pytest.mark.slow
def test_scale_smoke():
    # ~2M aristas en 100000 nodos
    graph, _ = generate(four_parameter_spec(100000, 5, 7e-4, 0.9), seed=0, threads=4)
    assert 1.5e6 < graph.nnz < 2.5e6
    started = time.perf_counter()
    projection_svd(graph, ProjectionConfig(rank=5, oversample_r=5, oversample_s=5, power_q=1))
    assert time.perf_counter() - started < 10
    started = time.perf_counter()
    sampling_svd(graph, SamplingConfig(rank=5, p=0.7))
    assert time.perf_counter() - started < 30


def test_compute_factors_dispatch():
    graph, dense = low_rank_graph(60, 2, seed=3)
    for config in (ExactConfig(rank=2), ProjectionConfig(rank=2), SamplingConfig(rank=2, p=1.0)):
        factors = compute_factors(graph, config)
        assert np.linalg.norm(factors.reconstruct() - dense) <= 1e-8 * np.linalg.norm(dense)


def test_fix_signs_makes_largest_entry_positive():
    U = np.array([[0.1, -0.9], [-0.8, 0.2], [0.3, 0.1]])
    V = np.ones((3, 2))
    fixed_U, fixed_V = fix_signs(U, V)
    assert fixed_U[1, 0] == 0.8
    assert fixed_U[0, 1] == 0.9
    assert fixed_V[:, 0].tolist() == [-1.0, -1.0, -1.0]
    assert fixed_V[:, 1].tolist() == [-1.0, -1.0, -1.0]
