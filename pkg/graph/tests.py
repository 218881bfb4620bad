import io

import numpy as np
import pytest
from django.core.exceptions import ValidationError

from core.exceptions import CapacityError, EdgeListError
from .edgelist import from_edge_list, read_edge_list, to_edge_list, write_edge_list
from .sparse import (
    SparseDirectedGraph, degrees, from_dense, multiply_dense, permute_nodes, to_dense, transpose,
)


def random_graph(n, density, seed):
    rng = np.random.default_rng(seed)
    dense = (rng.random((n, n)) < density).astype(float)
    np.fill_diagonal(dense, 0.0)
    return from_dense(dense), dense


class TestFromEdgeList:
    def test_two_edges_with_hint(self):
        graph = from_edge_list(b'0\t1\n1\t2\n', n_hint=3)
        assert graph.n == 3
        assert graph.nnz == 2
        assert graph.row_offsets.tolist() == [0, 1, 2, 2]
        assert graph.col_indices.tolist() == [1, 2]
        assert graph.values.tolist() == [1.0, 1.0]

    def test_empty_stream_uses_hint(self):
        graph = from_edge_list(b'', n_hint=4)
        assert graph.n == 4
        assert graph.nnz == 0
        assert graph.row_offsets.tolist() == [0, 0, 0, 0, 0]

    def test_duplicates_collapse_to_one(self):
        graph = from_edge_list(b'0 1\n0 1\n2 0\n')
        assert graph.nnz == 2
        assert graph.values.tolist() == [1.0, 1.0]

    def test_duplicates_match_set_oracle(self):
        rng = np.random.default_rng(3)
        pairs = rng.integers(0, 20, size=(300, 2))
        text = ''.join(f'{src}\t{dst}\n' for src, dst in pairs).encode()
        graph = from_edge_list(text, n_hint=20)
        expected = sorted(set(map(tuple, pairs.tolist())))
        rows = np.repeat(np.arange(20), np.diff(graph.row_offsets))
        assert list(zip(rows.tolist(), graph.col_indices.tolist())) == expected

    def test_comments_and_blank_lines_are_ignored(self):
        graph = from_edge_list(b'# red de prueba\n\n0\t1\n# fin\n')
        assert graph.n == 2
        assert graph.nnz == 1

    def test_n_is_max_id_plus_one_or_hint(self):
        assert from_edge_list(b'0\t5\n').n == 6
        assert from_edge_list(b'0\t5\n', n_hint=10).n == 10

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(EdgeListError) as error:
            from_edge_list(b'0\t1\n1\tx\n')
        assert error.value.line_number == 2
        assert 'línea 2' in error.value.messages[0]

    def test_wrong_field_count(self):
        with pytest.raises(EdgeListError) as error:
            from_edge_list(b'0\t1\t2\n')
        assert error.value.line_number == 1

    def test_negative_id_is_rejected(self):
        with pytest.raises(EdgeListError):
            from_edge_list(b'-1\t2\n')

    def test_id_out_of_hint_range(self):
        with pytest.raises(EdgeListError) as error:
            from_edge_list(b'0\t1\n2\t3\n', n_hint=3)
        assert error.value.line_number == 2

    def test_edge_list_error_is_a_validation_error(self):
        with pytest.raises(ValidationError):
            from_edge_list(b'a b\n')

    def test_one_based(self):
        graph = from_edge_list(b'1\t2\n2\t3\n', one_based=True)
        assert graph.n == 3
        assert graph.col_indices.tolist() == [1, 2]
        with pytest.raises(EdgeListError):
            from_edge_list(b'0\t1\n', one_based=True)

    def test_accepts_text_lines(self):
        graph = from_edge_list(io.StringIO('0\t1\n'))
        assert graph.nnz == 1


class TestEdgeListRoundTrip:
    def test_round_trip_is_identity(self):
        graph, _ = random_graph(40, 0.1, seed=11)
        sink = io.BytesIO()
        to_edge_list(graph, sink)
        assert from_edge_list(sink.getvalue(), n_hint=graph.n) == graph

    def test_lines_are_sorted(self):
        graph = from_edge_list(b'2\t0\n0\t2\n0\t1\n')
        sink = io.BytesIO()
        to_edge_list(graph, sink)
        assert sink.getvalue() == b'0\t1\n0\t2\n2\t0\n'

    def test_files(self, tmp_path):
        graph, _ = random_graph(15, 0.3, seed=5)
        path = tmp_path / 'red.tsv'
        write_edge_list(graph, path)
        assert read_edge_list(path, n_hint=15) == graph


class TestSparseDirectedGraph:
    def test_rejects_bad_offsets(self):
        with pytest.raises(ValidationError):
            SparseDirectedGraph(2, [0, 2, 1], [1, 0], [1.0, 1.0])

    def test_rejects_unsorted_columns(self):
        with pytest.raises(ValidationError):
            SparseDirectedGraph(3, [0, 2, 2, 2], [2, 1], [1.0, 1.0])

    def test_rejects_non_positive_values(self):
        with pytest.raises(ValidationError):
            SparseDirectedGraph(2, [0, 1, 1], [1], [0.0])

    def test_rejects_column_out_of_range(self):
        with pytest.raises(ValidationError):
            SparseDirectedGraph(2, [0, 1, 1], [2], [1.0])

    def test_arrays_are_read_only(self):
        graph = from_edge_list(b'0\t1\n')
        with pytest.raises(ValueError):
            graph.values[0] = 3.0

    def test_from_dense_keeps_weights(self):
        graph = from_dense([[0.0, 0.5], [0.25, 0.0]])
        assert graph.values.tolist() == [0.5, 0.25]
        assert to_dense(graph).tolist() == [[0.0, 0.5], [0.25, 0.0]]

    def test_from_dense_rejects_negative(self):
        with pytest.raises(ValidationError):
            from_dense([[0.0, -1.0], [0.0, 0.0]])

    def test_to_dense_respects_guard(self, settings):
        settings.RANDCLUST_DENSE_GUARD = 3
        with pytest.raises(CapacityError):
            to_dense(SparseDirectedGraph.empty(4))


class TestTranspose:
    def test_single_edge(self):
        graph = transpose(from_edge_list(b'0\t1\n'))
        assert graph.row_offsets.tolist() == [0, 0, 1]
        assert graph.col_indices.tolist() == [0]

    def test_symmetric_graph_is_unchanged(self):
        graph = from_edge_list(b'0\t1\n1\t0\n1\t2\n2\t1\n')
        assert transpose(graph) == graph

    def test_matches_dense_oracle_and_is_involution(self):
        graph, dense = random_graph(50, 0.1, seed=2)
        transposed = transpose(graph)
        assert np.array_equal(to_dense(transposed), dense.T)
        assert transposed.nnz == graph.nnz
        assert transpose(transposed) == graph


class TestMultiplyDense:
    def test_empty_graph_gives_zeros(self):
        product = multiply_dense(SparseDirectedGraph.empty(4), np.ones((4, 2)))
        assert np.array_equal(product, np.zeros((4, 2)))

    def test_identity_selects_columns(self):
        graph, dense = random_graph(5, 0.5, seed=8)
        assert np.array_equal(multiply_dense(graph, np.eye(5)), dense)

    @pytest.mark.parametrize('transposed', [False, True])
    def test_matches_dense_product(self, transposed):
        rng = np.random.default_rng(21)
        for seed in range(5):
            graph, dense = random_graph(64, 0.2, seed=seed)
            M = rng.standard_normal((64, 7))
            expected = (dense.T if transposed else dense) @ M
            result = multiply_dense(graph, M, transposed=transposed)
            assert np.max(np.abs(result - expected)) <= 1e-12

    def test_is_deterministic(self):
        graph, _ = random_graph(60, 0.2, seed=4)
        M = np.random.default_rng(0).standard_normal((60, 5))
        assert np.array_equal(multiply_dense(graph, M), multiply_dense(graph, M))

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            multiply_dense(SparseDirectedGraph.empty(3), np.ones((4, 1)))


class TestDegrees:
    def test_single_edge(self):
        out_deg, in_deg = degrees(from_edge_list(b'0\t1\n'))
        assert out_deg.tolist() == [1, 0]
        assert in_deg.tolist() == [0, 1]
        assert out_deg.dtype == np.uint64

    def test_empty_graph(self):
        out_deg, in_deg = degrees(SparseDirectedGraph.empty(3))
        assert out_deg.tolist() == [0, 0, 0]
        assert in_deg.tolist() == [0, 0, 0]

    def test_sums_equal_nnz(self):
        graph, _ = random_graph(200, 0.05, seed=9)
        out_deg, in_deg = degrees(graph)
        assert int(out_deg.sum()) == graph.nnz == int(in_deg.sum())


def test_permute_nodes_relabels_edges():
    graph = from_edge_list(b'0\t1\n1\t2\n')
    permuted = permute_nodes(graph, [2, 0, 1])
    # 0->1 pasa a 2->0 y 1->2 pasa a 0->1
    assert to_dense(permuted).tolist() == [[0, 1, 0], [0, 0, 0], [1, 0, 0]]
    with pytest.raises(ValidationError):
        permute_nodes(graph, [0, 0, 1])
