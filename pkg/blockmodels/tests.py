import json
import math

import numpy as np
import pytest
from django.core.exceptions import ValidationError

from core.exceptions import CapacityError, DegenerateModelError
from graph.sparse import degrees, to_dense
from .forms import BlockModelSpecForm, read_spec, spec_from_document
from .generators import generate, generate_dc_scbm, generate_scbm
from .population import population_matrix, population_structure
from .specs import (
    DcScbmSpec, ScbmSpec, balanced_sizes, four_parameter_spec, simulation_1_spec, simulation_2_spec,
    simulation_3_spec, spec_to_document,
)


def random_sizes(rng, n, k):
    cuts = np.sort(rng.choice(np.arange(1, n // 5), size=k - 1, replace=False)) * 5 if k > 1 else []
    bounds = np.concatenate([[0], cuts, [n]]).astype(int)
    return np.diff(bounds).tolist()


def random_scbm(rng):
    ky = int(rng.integers(1, 4))
    kz = int(rng.integers(ky, 5))
    n = int(rng.integers(12, 60)) * 5
    b = rng.uniform(0.05, 0.6, size=(ky, kz))
    return ScbmSpec(n=n, ky=ky, kz=kz, b=b, row_sizes=random_sizes(rng, n, ky),
                    col_sizes=random_sizes(rng, n, kz)).check_rank()


def random_thetas(rng, labels, k):
    theta = rng.uniform(0.2, 1.0, size=len(labels))
    for cluster in range(k):
        members = labels == cluster
        theta[members] /= theta[members].max()
    return theta


def random_dc_scbm(rng):
    base = random_scbm(rng)
    memberships = base.memberships()
    return DcScbmSpec(
        base=base,
        theta_y=random_thetas(rng, memberships.y, base.ky),
        theta_z=random_thetas(rng, memberships.z, base.kz),
    )


def expected_edges(spec):
    P = population_matrix(spec)
    off = ~np.eye(spec.n, dtype=bool)
    return P[off].sum(), math.sqrt((P[off] * (1 - P[off])).sum())


class TestSpecs:
    def test_balanced_sizes(self):
        assert balanced_sizes(10, 3) == [4, 3, 3]
        assert balanced_sizes(9, 3) == [3, 3, 3]
        with pytest.raises(ValidationError):
            balanced_sizes(2, 3)

    def test_sizes_must_sum_to_n(self):
        with pytest.raises(ValidationError) as error:
            ScbmSpec(n=10, ky=1, kz=1, b=[[0.3]], row_sizes=[9], col_sizes=[10])
        assert any('row_sizes' in message for message in error.value.messages)

    def test_ky_not_greater_than_kz(self):
        with pytest.raises(ValidationError):
            ScbmSpec(n=4, ky=2, kz=1, b=[[0.1], [0.2]], row_sizes=[2, 2], col_sizes=[4])

    def test_b_entries_are_probabilities(self):
        with pytest.raises(ValidationError):
            ScbmSpec(n=4, ky=1, kz=1, b=[[1.5]], row_sizes=[4], col_sizes=[4])

    def test_degenerate_b_is_built_but_fails_rank_check(self):
        spec = ScbmSpec(n=4, ky=2, kz=2, b=np.zeros((2, 2)), row_sizes=[2, 2], col_sizes=[2, 2])
        with pytest.raises(ValidationError):
            spec.check_rank()

    def test_four_parameter_spec_matches_simulation_one(self):
        spec = four_parameter_spec(300, 3, 0.2, 0.5)
        assert np.allclose(np.diag(spec.b), 0.2)
        assert np.allclose(spec.b[~np.eye(3, dtype=bool)], 0.1)
        assert spec.row_sizes == (100, 100, 100)
        assert np.array_equal(simulation_1_spec(300).b, spec.b)

    def test_four_parameter_lambda_zero_is_rank_deficient(self):
        with pytest.raises(ValidationError):
            four_parameter_spec(300, 3, 0.2, 0.0)

    def test_four_parameter_lambda_one_is_diagonal(self):
        spec = four_parameter_spec(40, 4, 0.3, 1.0)
        assert np.allclose(spec.b, 0.3 * np.eye(4))

    def test_four_parameter_requires_k_divides_n(self):
        with pytest.raises(ValidationError):
            four_parameter_spec(301, 3, 0.2, 0.5)

    def test_simulation_one_with_unbalanced_n(self):
        spec = simulation_1_spec(301)
        assert spec.row_sizes == (101, 100, 100)

    def test_simulation_two_is_seeded(self):
        first = simulation_2_spec(300, seed=4)
        assert (first.ky, first.kz) == (2, 3)
        assert np.all((first.b >= 0.01) & (first.b <= 0.3))
        assert np.array_equal(first.b, simulation_2_spec(300, seed=4).b)
        assert not np.array_equal(first.b, simulation_2_spec(300, seed=5).b)

    def test_simulation_three_propensities(self):
        spec = simulation_3_spec(300, seed=1)
        memberships = spec.memberships()
        assert set(np.unique(spec.theta_y).tolist()) <= {0.2, 1.0}
        for cluster in range(spec.kz):
            assert spec.theta_z[memberships.z == cluster].max() == 1.0
        assert np.mean(spec.theta_y == 0.2) > 0.5

    def test_dc_identifiability(self):
        base = ScbmSpec(n=4, ky=1, kz=1, b=[[0.5]], row_sizes=[4], col_sizes=[4])
        with pytest.raises(ValidationError):
            DcScbmSpec(base=base, theta_y=np.zeros(4), theta_z=np.zeros(4))
        with pytest.raises(ValidationError):
            DcScbmSpec(base=base, theta_y=[0.5] * 4, theta_z=[1.0] * 4)

    def test_dc_probabilities_must_not_exceed_one(self):
        base = ScbmSpec(n=4, ky=1, kz=1, b=[[1.0]], row_sizes=[4], col_sizes=[4])
        assert DcScbmSpec(base=base).theta_y.tolist() == [1.0] * 4
        with pytest.raises(ValidationError):
            DcScbmSpec(base=base, theta_y=[1.0, 2.0, 1.0, 1.0], theta_z=[1.0] * 4)


class TestGenerators:
    def test_zero_b_gives_empty_graph(self):
        spec = ScbmSpec(n=6, ky=2, kz=2, b=np.zeros((2, 2)), row_sizes=[3, 3], col_sizes=[3, 3])
        graph, memberships = generate_scbm(spec, seed=1)
        assert graph.nnz == 0
        assert memberships.y.tolist() == [0, 0, 0, 1, 1, 1]

    def test_all_ones_gives_complete_digraph(self):
        spec = ScbmSpec(n=4, ky=1, kz=1, b=[[1.0]], row_sizes=[4], col_sizes=[4])
        graph, _ = generate_scbm(spec, seed=0)
        assert graph.nnz == 12
        assert np.array_equal(to_dense(graph), np.ones((4, 4)) - np.eye(4))

    def test_mean_over_replicates_matches_population(self):
        spec = simulation_1_spec(30)
        P = population_matrix(spec)
        replicates = 500
        mean = sum(to_dense(generate(spec, seed=seed)[0]) for seed in range(replicates)) / replicates
        band = 4 * np.sqrt(P * (1 - P) / replicates)
        assert np.all(np.diag(mean) == 0.0)
        outside = np.abs(mean - (P - np.diag(np.diag(P)))) > band
        # 870 entradas fuera de la diagonal: a 4 sigma se esperan menos de una por azar
        assert outside.sum() <= 2

    def test_simulation_one_edge_count(self):
        spec = simulation_1_spec(300)
        graph, _ = generate_scbm(spec, seed=7)
        mean, sd = expected_edges(spec)
        assert abs(graph.nnz - mean) <= 3 * sd
        assert int(degrees(graph)[0].sum()) == graph.nnz

    def test_no_self_loops(self):
        graph, _ = generate(simulation_1_spec(90), seed=3)
        assert not np.any(np.diag(to_dense(graph)))

    def test_deterministic_for_any_thread_count(self):
        spec = simulation_2_spec(240, seed=2)
        single, _ = generate(spec, seed=11, threads=1)
        assert generate(spec, seed=11, threads=1)[0] == single
        assert generate(spec, seed=11, threads=4)[0] == single
        assert generate(spec, seed=12)[0] != single

    def test_dc_with_unit_thetas_is_bit_identical(self):
        base = simulation_1_spec(150)
        dc = DcScbmSpec(base=base, theta_y=np.ones(150), theta_z=np.ones(150))
        assert generate_dc_scbm(dc, seed=5)[0] == generate_scbm(base, seed=5)[0]

    def test_simulation_three_edge_count(self):
        spec = simulation_3_spec(300, seed=9)
        graph, memberships = generate(spec, seed=9)
        mean, sd = expected_edges(spec)
        assert abs(graph.nnz - mean) <= 3 * sd
        assert memberships.z.tolist() == spec.memberships().z.tolist()

    def test_dc_adjacency_is_binary(self):
        graph, _ = generate(simulation_3_spec(150, seed=3), seed=3)
        assert graph.nnz > 0
        assert np.all(graph.values == 1.0)
        assert not np.diag(to_dense(graph)).any()

    def test_block_densities_follow_b(self):
        spec = four_parameter_spec(600, 2, 0.3, 0.5)
        graph, memberships = generate(spec, seed=0)
        dense = to_dense(graph)
        first, second = memberships.y == 0, memberships.y == 1
        diagonal = dense[np.ix_(first, first)].sum() / (300 * 299)
        off = dense[np.ix_(first, second)].sum() / (300 * 300)
        assert diagonal == pytest.approx(0.3, abs=0.01)
        assert off == pytest.approx(0.15, abs=0.01)


class TestPopulation:
    def test_constant_population(self):
        spec = ScbmSpec(n=5, ky=1, kz=1, b=[[0.3]], row_sizes=[5], col_sizes=[5])
        assert np.array_equal(population_matrix(spec), np.full((5, 5), 0.3))

    def test_four_parameter_entries(self):
        spec = four_parameter_spec(30, 3, 0.4, 0.25)
        P = population_matrix(spec)
        assert P[0, 0] == pytest.approx(0.4)
        assert P[0, 9] == pytest.approx(0.4)
        assert P[0, 10] == pytest.approx(0.4 * 0.75)
        assert P[29, 5] == pytest.approx(0.4 * 0.75)

    def test_unit_thetas_keep_scbm_population(self):
        base = simulation_1_spec(60)
        dc = DcScbmSpec(base=base)
        assert np.array_equal(population_matrix(dc), population_matrix(base))

    def test_guard(self, settings):
        settings.RANDCLUST_DENSE_GUARD = 100
        with pytest.raises(CapacityError):
            population_matrix(simulation_1_spec(300))

    def test_four_parameter_gamma(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            K = int(rng.integers(2, 6))
            n = K * int(rng.integers(5, 40))
            alpha = float(rng.uniform(0.05, 1.0))
            lam = float(rng.uniform(0.1, 1.0))
            structure = population_structure(four_parameter_spec(n, K, alpha, lam))
            assert structure.gamma_n == pytest.approx(n * alpha * lam / K, rel=1e-10)

    def test_simulation_one_tau(self):
        structure = population_structure(simulation_1_spec(300))
        assert structure.tau == pytest.approx(math.sqrt(6 / 300))
        assert structure.sigma_n >= structure.gamma_n

    def test_single_cluster_separations(self):
        spec = ScbmSpec(n=10, ky=1, kz=1, b=[[0.5]], row_sizes=[10], col_sizes=[10])
        structure = population_structure(spec)
        assert structure.tau == math.inf
        assert structure.delta == math.inf
        assert structure.eta == 0.0

    def test_homogeneous_kappa_is_one(self):
        structure = population_structure(DcScbmSpec(base=simulation_2_spec(120, seed=3)))
        assert np.allclose(structure.kappa_y, 1.0)

    def test_degenerate_population(self):
        spec = ScbmSpec(n=6, ky=2, kz=2, b=[[0.1, 0.1], [0.1, 0.1]], row_sizes=[3, 3], col_sizes=[3, 3])
        with pytest.raises(DegenerateModelError):
            population_structure(spec)

    def test_left_vectors_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            spec = random_scbm(rng)
            structure = population_structure(spec)
            y = spec.memberships().y
            representatives = np.array([structure.U_bar[y == k][0] for k in range(spec.ky)])
            for k in range(spec.ky):
                assert np.allclose(structure.U_bar[y == k], representatives[k], atol=1e-8)
            for k in range(spec.ky):
                for l in range(k + 1, spec.ky):
                    distance = np.linalg.norm(representatives[k] - representatives[l])
                    expected = math.sqrt(1 / spec.row_sizes[k] + 1 / spec.row_sizes[l])
                    assert distance == pytest.approx(expected, abs=1e-8)

    def test_right_vectors_separation(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            spec = random_scbm(rng)
            structure = population_structure(spec)
            z = spec.memberships().z
            representatives = np.array([structure.V_bar[z == k][0] for k in range(spec.kz)])
            for k in range(spec.kz):
                assert np.allclose(structure.V_bar[z == k], representatives[k], atol=1e-8)
                for l in range(k + 1, spec.kz):
                    gap = np.linalg.norm(representatives[k] - representatives[l])
                    assert gap >= structure.delta - 1e-8

    def test_degree_corrected_directions(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            spec = random_dc_scbm(rng)
            structure = population_structure(spec)
            memberships = spec.memberships()
            U = structure.U_bar / np.linalg.norm(structure.U_bar, axis=1, keepdims=True)
            different = memberships.y[:, None] != memberships.y[None, :]
            assert np.allclose((U @ U.T)[different], 0.0, atol=1e-8)

            V = structure.V_bar / np.linalg.norm(structure.V_bar, axis=1, keepdims=True)
            directions = structure.right_directions
            directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)
            expected = (directions @ directions.T)[np.ix_(memberships.z, memberships.z)]
            assert np.allclose(V @ V.T, expected, atol=1e-8)


VALID_DOCUMENT = {
    'n': 6,
    'ky': 2,
    'kz': 2,
    'b': [[0.5, 0.1], [0.1, 0.5]],
    'row_sizes': [3, 3],
    'col_sizes': [3, 3],
}


class TestSpecForm:
    def test_valid_scbm(self):
        form = BlockModelSpecForm(data=VALID_DOCUMENT)
        assert form.is_valid(), form.errors
        assert isinstance(form.spec, ScbmSpec)
        assert form.spec.row_sizes == (3, 3)

    def test_valid_dc_scbm(self):
        document = dict(VALID_DOCUMENT, theta_y=[1, 0.5, 1, 1, 1, 1], theta_z=[1] * 6)
        spec = spec_from_document(document)
        assert isinstance(spec, DcScbmSpec)
        assert spec.theta_y[1] == 0.5

    def test_sizes_not_summing_to_n_name_the_field(self):
        form = BlockModelSpecForm(data=dict(VALID_DOCUMENT, row_sizes=[3, 2]))
        assert not form.is_valid()
        assert 'row_sizes' in form.errors
        with pytest.raises(ValidationError) as error:
            spec_from_document(dict(VALID_DOCUMENT, row_sizes=[3, 2]))
        assert 'row_sizes' in error.value.messages[0]

    def test_b_shape(self):
        form = BlockModelSpecForm(data=dict(VALID_DOCUMENT, b=[[0.5, 0.1, 0.2], [0.1, 0.5, 0.2]]))
        assert not form.is_valid()
        assert 'b' in form.errors

    def test_b_out_of_range(self):
        form = BlockModelSpecForm(data=dict(VALID_DOCUMENT, b=[[1.5, 0.1], [0.1, 0.5]]))
        assert not form.is_valid()
        assert 'b' in form.errors

    def test_thetas_go_together(self):
        form = BlockModelSpecForm(data=dict(VALID_DOCUMENT, theta_y=[1] * 6))
        assert not form.is_valid()
        assert '__all__' in form.errors

    def test_zero_b_is_accepted(self):
        spec = spec_from_document(dict(VALID_DOCUMENT, b=[[0, 0], [0, 0]]))
        assert generate(spec, seed=1)[0].nnz == 0

    def test_document_round_trip(self):
        spec = simulation_3_spec(30, seed=2)
        again = spec_from_document(json.loads(json.dumps(spec_to_document(spec))))
        assert np.array_equal(again.theta_z, spec.theta_z)
        assert np.array_equal(again.b, spec.b)

    def test_read_spec_rejects_invalid_json(self, tmp_path):
        path = tmp_path / 'spec.json'
        path.write_text('{"n": 3,', encoding='utf-8')
        with pytest.raises(ValidationError):
            read_spec(path)
        path.write_text('[1, 2]', encoding='utf-8')
        with pytest.raises(ValidationError):
            read_spec(path)
