import itertools
import math

import numpy as np
import pytest
import scipy.linalg
from django.core.exceptions import ValidationError
from scipy.sparse.linalg import ArpackNoConvergence

from blockmodels.generators import generate
from blockmodels.population import population_matrix, population_structure
from blockmodels.specs import four_parameter_spec, simulation_1_spec
from core.exceptions import CapacityError
from graph.sparse import from_dense, to_dense
from randsvd.factors import SvdFactor
from randsvd.sampling import sparsify
from .bounds import delta_term, phi, theoretical_bounds
from .misclustering import confusion_matrix, misclustering_rate
from . import norms
from .norms import (
    approximation_error, estimate_spectral_norm, power_iteration_norm, spectral_norm, subspace_distance,
)


def brute_force_rate(est, truth, k):
    best = min(
        np.sum(np.asarray(permutation)[est] != truth)
        for permutation in itertools.permutations(range(k))
    )
    return best / len(est)


class TestMisclustering:
    def test_identical_labels(self):
        truth = np.array([0, 1, 2, 0, 1, 2])
        assert misclustering_rate(truth, truth, 3) == 0.0

    def test_cyclic_shift_is_free(self):
        truth = np.array([0, 0, 1, 1, 2, 2, 2])
        assert misclustering_rate((truth + 1) % 3, truth, 3) == 0.0

    def test_one_flip_in_ten(self):
        truth = np.array([0] * 5 + [1] * 5)
        est = truth.copy()
        est[0] = 1
        assert misclustering_rate(est, truth, 2) == pytest.approx(0.1)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            k = int(rng.integers(1, 6))
            n = int(rng.integers(1, 30))
            est = rng.integers(0, k, size=n)
            truth = rng.integers(0, k, size=n)
            rate = misclustering_rate(est, truth, k)
            assert rate == pytest.approx(brute_force_rate(est, truth, k), abs=1e-12)
            assert rate == pytest.approx(misclustering_rate(truth, est, k), abs=1e-12)
            assert 0.0 <= rate <= 1.0

    @pytest.mark.parametrize('k', [2, 3, 4, 5])
    def test_constant_labeling_against_balanced_truth(self, k):
        truth = np.repeat(np.arange(k), 6)
        assert misclustering_rate(np.zeros_like(truth), truth, k) == (k - 1) / k

    def test_confusion_matrix(self):
        confusion = confusion_matrix(np.array([0, 0, 1]), np.array([0, 1, 1]), 2)
        assert confusion.tolist() == [[1, 1], [0, 1]]

    def test_validation(self):
        with pytest.raises(ValidationError):
            misclustering_rate([0, 1], [0, 1, 1], 2)
        with pytest.raises(ValidationError):
            misclustering_rate([0, 2], [0, 1], 2)
        with pytest.raises(ValidationError):
            misclustering_rate([], [], 2)


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(5)) == pytest.approx(1.0, rel=1e-9)

    def test_diagonal_with_negative_entry(self):
        assert spectral_norm(np.diag([4.0, -7.0, 2.0])) == pytest.approx(7.0, rel=1e-9)

    def test_zero_matrix(self):
        estimate = estimate_spectral_norm(np.zeros((3, 4)))
        assert estimate.value == 0.0
        assert estimate.converged

    def test_matches_dense_svd(self):
        rng = np.random.default_rng(40)
        for _ in range(5):
            M = rng.standard_normal((40, 40))
            expected = np.linalg.svd(M, compute_uv=False)[0]
            assert spectral_norm(M) == pytest.approx(expected, rel=1e-7)

    def test_transpose_invariance(self):
        M = np.random.default_rng(3).standard_normal((30, 20))
        assert spectral_norm(M) == pytest.approx(spectral_norm(M.T), rel=1e-7)

    def test_power_iteration_flags_non_convergence(self):
        M = np.random.default_rng(5).standard_normal((30, 30))
        estimate = power_iteration_norm(M, max_iter=2)
        assert not estimate.converged
        assert estimate.iterations == 2
        assert estimate.value > 0

    def test_power_iteration_stops_on_residual(self):
        M = np.random.default_rng(6).standard_normal((40, 25))
        estimate = power_iteration_norm(M, tol=1e-10)
        assert estimate.converged
        assert estimate.value == pytest.approx(scipy.linalg.norm(M, 2), rel=1e-9)

    def test_falls_back_to_power_iteration(self, monkeypatch):
        def no_convergence(*args, **kwargs):
            raise ArpackNoConvergence('sin convergencia', np.array([]), np.array([]))

        monkeypatch.setattr(norms, 'eigsh', no_convergence)
        M = np.random.default_rng(8).standard_normal((30, 30))
        estimate = estimate_spectral_norm(M)
        assert estimate.converged
        assert estimate.value == pytest.approx(scipy.linalg.norm(M, 2), rel=1e-8)

    def test_adjacency_minus_population_matches_dense_norm(self):
        spec = simulation_1_spec(600)
        graph, _ = generate(spec, seed=11)
        M = to_dense(graph) - population_matrix(spec)
        assert spectral_norm(M) == pytest.approx(scipy.linalg.norm(M, 2), rel=1e-9)

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            spectral_norm(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestApproximationError:
    def test_equal_matrices(self):
        P = population_matrix(simulation_1_spec(30))
        assert approximation_error(P, P) == 0.0
        binary = (np.arange(16).reshape(4, 4) % 3 == 0).astype(float)
        assert approximation_error(from_dense(binary), binary) == 0.0

    def test_factors_are_reconstructed(self):
        rng = np.random.default_rng(2)
        U, _ = np.linalg.qr(rng.standard_normal((20, 2)))
        V, _ = np.linalg.qr(rng.standard_normal((20, 2)))
        factors = SvdFactor(U=U, sigma=np.array([3.0, 1.0]), V=V)
        P = factors.reconstruct()
        assert approximation_error(factors, P) == pytest.approx(0.0, abs=1e-12)
        assert approximation_error(factors, np.zeros((20, 20))) == pytest.approx(3.0, rel=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            approximation_error(np.zeros((3, 3)), np.zeros((4, 4)))

    def test_guard(self, settings):
        settings.RANDCLUST_DENSE_GUARD = 10
        with pytest.raises(CapacityError):
            approximation_error(np.zeros((11, 11)), np.zeros((11, 11)))

    @pytest.mark.slow
    def test_adjacency_error_follows_rate(self):
        spec = simulation_1_spec(300)
        P = population_matrix(spec)
        bound = 3 * math.sqrt(300 * 0.2)
        for seed in range(20):
            graph, _ = generate(spec, seed=seed)
            assert approximation_error(graph, P) <= bound

    @pytest.mark.slow
    def test_sampling_adds_error(self):
        spec = simulation_1_spec(300)
        P = population_matrix(spec)
        plain, sampled = [], []
        for seed in range(20):
            graph, _ = generate(spec, seed=seed)
            plain.append(approximation_error(graph, P))
            sampled.append(approximation_error(sparsify(graph, 0.7, seed=seed), P))
        assert np.mean(sampled) >= np.mean(plain)


def test_subspace_distance():
    basis = np.eye(4)[:, :2]
    assert subspace_distance(basis, basis @ np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(0.0, abs=1e-12)
    assert subspace_distance(basis, np.eye(4)[:, 2:]) == pytest.approx(1.0)


class TestBounds:
    def test_full_rate_terms(self):
        n, alpha = 400, 0.05
        assert delta_term(n, alpha, 1.0) == pytest.approx(2 * alpha * math.sqrt(n))
        expected = max(math.sqrt(n * alpha), math.sqrt(math.log(n)), 2 * alpha * math.sqrt(n))
        assert phi(n, 1.0, alpha) == pytest.approx(expected)

    def test_sampling_inflates_phi(self):
        assert phi(500, 0.5, 0.1) > phi(500, 1.0, 0.1)
        # con p < 1/2 el máximo lo da sqrt(1/p - 1)
        p = 0.2
        factor = 1 + p ** 0.25 * 2.0
        assert delta_term(100, 0.1, p) == pytest.approx(math.sqrt(100 * 0.01 / p) * factor)

    def test_four_parameter_projection_rate(self):
        n, K, alpha, lam = 1000, 2, 0.1, 0.5
        spec = four_parameter_spec(n, K, alpha, lam)
        structure = population_structure(spec)
        report = theoretical_bounds(n, 1.0, alpha, structure, K, K, (spec.row_sizes, spec.col_sizes))
        # K·α / (τ² γ²) con γ = nαλ/K y τ² = 2K/n da K² / (2nαλ²)
        assert report.rp_row_bound == pytest.approx(K ** 2 / (2 * n * alpha * lam ** 2), rel=1e-8)
        assert report.rp_row_bound == pytest.approx(0.08, rel=1e-8)
        assert report.sparsity_ok
        assert report.conditions['C1'] < 1

    def test_sparse_regime_is_flagged(self):
        n = 600
        alpha = 0.5 * math.log(n) / n
        spec = four_parameter_spec(n, 2, alpha, 0.5)
        structure = population_structure(spec)
        report = theoretical_bounds(n, 1.0, alpha, structure, 2, 2, (spec.row_sizes, spec.col_sizes))
        assert not report.sparsity_ok
        assert report.conditions['C1'] == pytest.approx(2.0)

    def test_sampling_bounds_grow_as_p_shrinks(self):
        spec = simulation_1_spec(300)
        structure = population_structure(spec)
        sizes = (spec.row_sizes, spec.col_sizes)
        dense = theoretical_bounds(300, 1.0, 0.2, structure, 3, 3, sizes)
        sparse = theoretical_bounds(300, 0.3, 0.2, structure, 3, 3, sizes)
        assert sparse.rs_row_bound > dense.rs_row_bound
        assert sparse.dc_rs_col_bound > dense.dc_rs_col_bound
        assert sparse.rp_row_bound == dense.rp_row_bound
        assert set(dense.conditions) == {f'C{i}' for i in range(1, 10)}

    def test_validation(self):
        spec = simulation_1_spec(30)
        structure = population_structure(spec)
        sizes = (spec.row_sizes, spec.col_sizes)
        with pytest.raises(ValidationError):
            theoretical_bounds(30, 0.0, 0.2, structure, 3, 3, sizes)
        with pytest.raises(ValidationError):
            theoretical_bounds(30, 1.0, 0.2, structure, 2, 3, sizes)
