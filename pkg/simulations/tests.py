import io
import json

import numpy as np
import pandas as pd
import pytest
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.urls import reverse

from blockmodels.generators import generate
from blockmodels.specs import simulation_1_spec, spec_to_document
from graph.edgelist import read_edge_list, write_edge_list
from graph.sparse import from_dense, to_dense
from .factories import SimulationRecordFactory, SimulationRunFactory
from .models import SimulationRecord, SimulationRun
from .reports import SIMULATION_COLUMNS, SimulationReport, SimulationRow, read_simulation_csv
from .runner import bench_backends, replicate_seed, run_replicate, run_simulation


def write_spec(path, document):
    path.write_text(json.dumps(document), encoding='utf-8')
    return str(path)


@pytest.fixture
def simulation_1_file(tmp_path):
    return write_spec(tmp_path / 'sim1.json', spec_to_document(simulation_1_spec(300)))


@pytest.fixture
def edges_file(tmp_path):
    graph, _ = generate(simulation_1_spec(150), seed=7)
    path = tmp_path / 'red.tsv'
    write_edge_list(graph, path)
    return str(path)


def cocluster_json(edges, *args):
    out = io.StringIO()
    call_command('cocluster', edges, '--ky', '3', '--kz', '3', *args, stdout=out)
    return out.getvalue()


def row(**overrides):
    values = dict(scenario=1, n=300, rep=0, method='original', row_mis=0.1, col_mis=0.2,
                  approx_err=10.0, wall_ms=5.0, seed=42)
    values.update(overrides)
    return SimulationRow(**values)


class TestSimulationRow:
    def test_rates_must_be_in_unit_interval(self):
        with pytest.raises(ValidationError):
            row(row_mis=1.5)
        with pytest.raises(ValidationError):
            row(col_mis=-0.1)

    def test_wall_time_must_be_positive(self):
        with pytest.raises(ValidationError):
            row(wall_ms=0.0)


class TestSimulationReport:
    def test_header_is_written_first(self, tmp_path):
        path = tmp_path / 'sim.csv'
        SimulationReport(path)
        assert path.read_text(encoding='utf-8') == ','.join(SIMULATION_COLUMNS) + '\n'

    def test_rows_are_appended(self, tmp_path):
        path = tmp_path / 'sim.csv'
        report = SimulationReport(path)
        report.extend([row(rep=0), row(rep=1, method='projection', approx_err=None)])
        lines = path.read_text(encoding='utf-8').splitlines()
        assert len(lines) == 3
        assert lines[1] == '1,300,0,original,0.10000000000000001,0.20000000000000001,10,5,42'
        # approx_err vacío
        assert lines[2].split(',')[6] == ''
        frame = read_simulation_csv(path)
        assert frame['approx_err'].isna().tolist() == [False, True]

    def test_means_by_size_and_method(self):
        report = SimulationReport()
        report.extend([row(rep=0, row_mis=0.1), row(rep=1, row_mis=0.3), row(n=600, row_mis=0.0)])
        means = report.means()
        assert means.loc[(300, 'original'), 'row_mis'] == pytest.approx(0.2)
        assert means.loc[(600, 'original'), 'row_mis'] == 0.0


class TestRunner:
    def test_replicate_rows(self):
        rows = run_replicate(1, 90, 0, master_seed=3)
        assert [r.method for r in rows] == ['original', 'projection', 'sampling']
        assert all(r.seed == replicate_seed(3, 1, 90, 0) for r in rows)
        assert all(r.approx_err is not None and r.approx_err > 0 for r in rows)

    def test_replicate_is_reproducible(self):
        first = run_replicate(2, 60, 4, master_seed=1)
        second = run_replicate(2, 60, 4, master_seed=1)
        for a, b in zip(first, second):
            assert (a.row_mis, a.col_mis, a.approx_err, a.seed) == (b.row_mis, b.col_mis, b.approx_err, b.seed)

    def test_order_does_not_depend_on_threads(self):
        serial = run_simulation(2, [60, 90], 3, 5, SimulationReport(), threads=1).to_frame()
        threaded = run_simulation(2, [60, 90], 3, 5, SimulationReport(), threads=3).to_frame()
        columns = ['scenario', 'n', 'rep', 'method', 'row_mis', 'col_mis', 'approx_err', 'seed']
        pd.testing.assert_frame_equal(serial[columns], threaded[columns])
        assert serial['rep'].tolist() == [rep for _ in range(2) for rep in range(3) for _ in range(3)]

    def test_no_approximation_error_above_guard(self, settings):
        settings.RANDCLUST_DENSE_GUARD = 50
        report = run_simulation(1, [60], 1, 0, SimulationReport())
        assert [r.approx_err for r in report.rows] == [None, None, None]

    def test_scenario_three_uses_kmedian(self):
        rows = run_replicate(3, 60, 0, master_seed=2)
        assert len(rows) == 3
        assert all(0.0 <= r.row_mis <= 1.0 for r in rows)

    def test_on_rows_receives_each_size(self):
        seen = []
        run_simulation(1, [30, 60], 2, 0, SimulationReport(), on_rows=lambda n, rows: seen.append((n, len(rows))))
        assert seen == [(30, 6), (60, 6)]

    def test_validation(self):
        with pytest.raises(ValidationError):
            run_simulation(4, [60], 1, 0, SimulationReport())
        with pytest.raises(ValidationError):
            run_simulation(1, [60], 0, 0, SimulationReport())

    def test_bench_rows(self):
        graph, _ = generate(simulation_1_spec(90), seed=1)
        frame = bench_backends(graph, 2, ['exact', 'projection', 'sampling'], 3, seed=4)
        assert frame['backend'].tolist() == ['exact', 'projection', 'sampling:total', 'sampling:svd']
        assert (frame['median_ms'] > 0).all()
        assert (frame['nnz'] == graph.nnz).all()
        total, svd = frame.set_index('backend').loc[['sampling:total', 'sampling:svd'], 'median_ms']
        assert total >= svd
        with pytest.raises(ValidationError):
            bench_backends(graph, 2, ['lanczos'], 1)


@pytest.mark.django_db
class TestModels:
    def test_run_str(self):
        run = SimulationRunFactory(scenario=2, n_list=[300])
        assert str(run) == 'Escenario 2 (n = 300; 2 réplicas)'
        assert str(SimulationRecordFactory(run=run, rep=4)) == 'n=300 rep=4 Original (SVD iterativa)'

    def test_run_rejects_bad_sizes(self):
        run = SimulationRunFactory.build(n_list=[300, 0])
        with pytest.raises(ValidationError) as error:
            run.full_clean()
        assert 'n_list' in error.value.message_dict

    def test_record_rejects_zero_time(self):
        record = SimulationRecordFactory.build(run=SimulationRunFactory(), wall_ms=0.0)
        with pytest.raises(ValidationError) as error:
            record.full_clean()
        assert 'wall_ms' in error.value.message_dict

    def test_record_rejects_rate_above_one(self):
        record = SimulationRecordFactory.build(run=SimulationRunFactory(), row_mis=1.2)
        with pytest.raises(ValidationError):
            record.full_clean()

    def test_record_scenario_must_match_run(self):
        record = SimulationRecordFactory.build(run=SimulationRunFactory(scenario=1), scenario=3)
        with pytest.raises(ValidationError):
            record.full_clean()

    def test_summary_averages(self):
        run = SimulationRunFactory()
        SimulationRecordFactory(run=run, row_mis=0.1, approx_err=10.0)
        SimulationRecordFactory(run=run, row_mis=0.3, approx_err=None)
        SimulationRecordFactory(run=run, method='projection', row_mis=0.0)
        summary = list(run.summary())
        assert [(s['n'], s['method'], s['replicas']) for s in summary] == [
            (300, 'original', 2), (300, 'projection', 1),
        ]
        assert summary[0]['row_mis'] == pytest.approx(0.2)
        assert summary[0]['approx_err'] == pytest.approx(10.0)


@pytest.mark.django_db
class TestViews:
    def test_home(self, client):
        SimulationRunFactory()
        response = client.get(reverse('core:home'))
        assert response.status_code == 200
        assert len(response.context['ultimas_corridas']) == 1

    def test_run_list(self, client):
        SimulationRunFactory.create_batch(3)
        response = client.get(reverse('simulations:run_list'))
        assert response.status_code == 200
        assert len(response.context['table'].rows) == 3

    def test_run_detail_with_filter(self, client):
        run = SimulationRunFactory()
        SimulationRecordFactory(run=run, method='original')
        SimulationRecordFactory(run=run, method='sampling', approx_err=None)
        SimulationRecordFactory(run=SimulationRunFactory())
        url = reverse('simulations:run_detail', args=[run.pk])
        response = client.get(url)
        assert response.status_code == 200
        assert response.context['run'] == run
        assert len(response.context['table'].rows) == 2
        filtered = client.get(url, {'method': 'sampling'})
        assert len(filtered.context['table'].rows) == 1

    def test_missing_run(self, client):
        assert client.get(reverse('simulations:run_detail', args=[999])).status_code == 404


class TestGenerateCommand:
    def test_writes_reproducible_files(self, tmp_path, simulation_1_file):
        outputs = []
        for attempt in range(2):
            edges, labels = tmp_path / f'edges{attempt}.tsv', tmp_path / f'labels{attempt}.tsv'
            call_command('generate', simulation_1_file, str(edges), str(labels), '--seed', '7', stdout=io.StringIO())
            outputs.append((edges.read_bytes(), labels.read_bytes()))
        assert outputs[0] == outputs[1]
        lines = outputs[0][1].decode().splitlines()
        assert len(lines) == 300
        assert lines[0] == '0\t0\t0'
        assert lines[-1] == '299\t2\t2'

    def test_thread_count_does_not_change_output(self, tmp_path, simulation_1_file):
        single, many = tmp_path / 'a.tsv', tmp_path / 'b.tsv'
        call_command('generate', simulation_1_file, str(single), str(tmp_path / 'la.tsv'),
                     '--threads', '1', stdout=io.StringIO())
        call_command('generate', simulation_1_file, str(many), str(tmp_path / 'lb.tsv'),
                     '--threads', '4', stdout=io.StringIO())
        assert single.read_bytes() == many.read_bytes()

    def test_shuffled_labels_follow_nodes(self, tmp_path, simulation_1_file):
        plain, shuffled = tmp_path / 'plain.tsv', tmp_path / 'shuffled.tsv'
        call_command('generate', simulation_1_file, str(plain), str(tmp_path / 'pl.tsv'), stdout=io.StringIO())
        call_command('generate', simulation_1_file, str(shuffled), str(tmp_path / 'sl.tsv'),
                     '--shuffle-labels', stdout=io.StringIO())
        assert read_edge_list(plain, n_hint=300).nnz == read_edge_list(shuffled, n_hint=300).nnz
        labels = np.loadtxt(tmp_path / 'sl.tsv', dtype=np.int64)
        assert labels[:, 0].tolist() == list(range(300))
        assert np.bincount(labels[:, 1]).tolist() == [100, 100, 100]
        assert labels[:, 1].tolist() != sorted(labels[:, 1].tolist())

    def test_zero_b_gives_empty_edge_file(self, tmp_path):
        spec_file = write_spec(tmp_path / 'zero.json', {
            'n': 4, 'ky': 2, 'kz': 2, 'b': [[0, 0], [0, 0]], 'row_sizes': [2, 2], 'col_sizes': [2, 2],
        })
        edges = tmp_path / 'edges.tsv'
        call_command('generate', spec_file, str(edges), str(tmp_path / 'labels.tsv'), stdout=io.StringIO())
        assert edges.read_bytes() == b''

    def test_invalid_sizes_exit_with_validation_code(self, tmp_path):
        spec_file = write_spec(tmp_path / 'bad.json', {
            'n': 10, 'ky': 2, 'kz': 2, 'b': [[0.2, 0.1], [0.1, 0.2]], 'row_sizes': [5, 4], 'col_sizes': [5, 5],
        })
        with pytest.raises(CommandError) as error:
            call_command('generate', spec_file, str(tmp_path / 'e.tsv'), str(tmp_path / 'l.tsv'))
        assert error.value.returncode == 2
        assert 'row_sizes' in str(error.value)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"n": ', encoding='utf-8')
        with pytest.raises(CommandError) as error:
            call_command('generate', str(path), str(tmp_path / 'e.tsv'), str(tmp_path / 'l.tsv'))
        assert error.value.returncode == 2


class TestCoclusterCommand:
    def test_schema(self, edges_file):
        document = json.loads(cocluster_json(edges_file))
        assert list(document) == ['row_labels', 'col_labels', 'backend', 'method', 'diagnostics']
        assert document['backend'] == 'projection'
        assert document['method'] == 'kmeans'
        assert len(document['row_labels']) == 150
        assert set(document['row_labels']) <= {0, 1, 2}
        assert set(document['col_labels']) <= {0, 1, 2}
        assert 'timings' not in document['diagnostics']

    def test_same_seed_gives_identical_bytes(self, edges_file):
        assert cocluster_json(edges_file, '--seed', '3') == cocluster_json(edges_file, '--seed', '3')

    def test_full_rate_sampling_matches_exact(self, edges_file):
        exact = json.loads(cocluster_json(edges_file, '--backend', 'exact'))
        sampled = json.loads(cocluster_json(edges_file, '--backend', 'sampling', '--sample-p', '1.0'))
        assert exact['row_labels'] == sampled['row_labels']
        assert exact['col_labels'] == sampled['col_labels']

    def test_timings_on_request(self, edges_file):
        document = json.loads(cocluster_json(edges_file, '--with-timings'))
        assert set(document['diagnostics']['timings']) >= {'svd_ms', 'total_ms'}

    def test_writes_file(self, tmp_path, edges_file):
        target = tmp_path / 'out.json'
        cocluster_json(edges_file, '--out-json', str(target), '--method', 'spherical_kmedian')
        assert json.loads(target.read_text(encoding='utf-8'))['method'] == 'spherical_kmedian'

    def test_dropped_zero_rows_are_marked(self, tmp_path):
        graph, _ = generate(simulation_1_spec(150), seed=7)
        dense = to_dense(graph)
        dense[-2:] = 0.0
        path = tmp_path / 'silenciosos.tsv'
        write_edge_list(from_dense(dense), path)
        document = json.loads(cocluster_json(str(path), '--nodes', '150', '--backend', 'exact',
                                             '--method', 'spherical_kmedian', '--zero-rows', 'drop'))
        assert document['row_labels'][-2:] == [-1, -1]
        assert set(document['row_labels'][:-2]) <= {0, 1, 2}
        assert document['diagnostics']['row_zero_rows'] == 2

    def test_drop_with_kmeans_is_a_validation_failure(self, edges_file):
        with pytest.raises(CommandError) as error:
            cocluster_json(edges_file, '--zero-rows', 'drop')
        assert error.value.returncode == 2

    def test_ky_above_kz_is_a_validation_failure(self, edges_file):
        with pytest.raises(CommandError) as error:
            call_command('cocluster', edges_file, '--ky', '3', '--kz', '2', stdout=io.StringIO())
        assert error.value.returncode == 2

    def test_missing_file_is_a_runtime_failure(self, tmp_path):
        with pytest.raises(CommandError) as error:
            cocluster_json(str(tmp_path / 'no-existe.tsv'))
        assert error.value.returncode == 1

    def test_malformed_edge_list(self, tmp_path):
        path = tmp_path / 'mal.tsv'
        path.write_text('0\t1\n1\tx\n', encoding='utf-8')
        with pytest.raises(CommandError) as error:
            cocluster_json(str(path))
        assert error.value.returncode == 2
        assert 'línea 2' in str(error.value)


class TestSimulateCommand:
    def test_row_count(self, tmp_path):
        out = tmp_path / 'sim.csv'
        call_command('simulate', '--scenario', '1', '--n-list', '300', '--reps', '2', '--out-csv', str(out),
                     stdout=io.StringIO())
        frame = read_simulation_csv(out)
        assert list(frame.columns) == SIMULATION_COLUMNS
        assert len(frame) == 6
        assert frame['method'].tolist() == ['original', 'projection', 'sampling'] * 2

    def test_prints_means_read_back_from_csv(self, tmp_path):
        out = tmp_path / 'sim.csv'
        stdout = io.StringIO()
        call_command('simulate', '--scenario', '1', '--n-list', '60', '--reps', '2', '--out-csv', str(out),
                     stdout=stdout)
        summary = [line for line in stdout.getvalue().splitlines() if line.startswith('n=60')]
        assert len(summary) == 3
        frame = read_simulation_csv(out)
        expected = frame[frame['method'] == 'projection']['row_mis'].mean()
        projection = next(line for line in summary if 'projection' in line)
        assert f'filas {expected:.4f}' in projection

    def test_scenario_two_header(self, tmp_path):
        out = tmp_path / 'sim.csv'
        call_command('simulate', '--scenario', '2', '--n-list', '60', '--reps', '1', '--out-csv', str(out),
                     stdout=io.StringIO())
        header = out.read_text(encoding='utf-8').splitlines()[0]
        assert header == 'scenario,n,rep,method,row_mis,col_mis,approx_err,wall_ms,seed'

    def test_override_spec_fixes_n(self, tmp_path):
        spec_file = write_spec(tmp_path / 'spec.json', spec_to_document(simulation_1_spec(45)))
        out = tmp_path / 'sim.csv'
        call_command('simulate', '--scenario', '1', '--reps', '1', '--override-spec', spec_file,
                     '--out-csv', str(out), stdout=io.StringIO())
        assert read_simulation_csv(out)['n'].tolist() == [45, 45, 45]

    @pytest.mark.django_db
    def test_save_persists_records(self, tmp_path):
        out = tmp_path / 'sim.csv'
        call_command('simulate', '--scenario', '1', '--n-list', '60,90', '--reps', '2', '--seed', '9',
                     '--out-csv', str(out), '--save', stdout=io.StringIO())
        run = SimulationRun.objects.get()
        assert run.n_list == [60, 90]
        assert run.seed == 9
        assert run.records.count() == 12
        frame = read_simulation_csv(out)
        stored = SimulationRecord.objects.get(run=run, n=90, rep=1, method='sampling')
        csv_row = frame[(frame['n'] == 90) & (frame['rep'] == 1) & (frame['method'] == 'sampling')].iloc[0]
        assert stored.row_mis == csv_row['row_mis']
        assert stored.seed == csv_row['seed']

    def test_unknown_scenario_is_rejected(self, tmp_path):
        with pytest.raises(CommandError):
            call_command('simulate', '--scenario', '4', '--out-csv', str(tmp_path / 'sim.csv'))


class TestBenchCommand:
    def test_one_row_per_backend(self, tmp_path, edges_file):
        out = tmp_path / 'bench.csv'
        call_command('bench', edges_file, '--rank', '3', '--reps', '3', '--out-csv', str(out), stdout=io.StringIO())
        frame = pd.read_csv(out)
        assert list(frame.columns) == ['backend', 'median_ms', 'nnz', 'n', 'rank']
        assert frame['backend'].tolist() == ['exact', 'projection', 'sampling:total', 'sampling:svd']
        assert (frame['rank'] == 3).all()
        assert (frame['n'] == 150).all()

    def test_selected_backends(self, tmp_path, edges_file):
        out = tmp_path / 'bench.csv'
        call_command('bench', edges_file, '--rank', '2', '--reps', '2', '--backends', 'projection',
                     '--out-csv', str(out), stdout=io.StringIO())
        assert pd.read_csv(out)['backend'].tolist() == ['projection']

    def test_unknown_backend(self, tmp_path, edges_file):
        with pytest.raises(CommandError) as error:
            call_command('bench', edges_file, '--rank', '2', '--backends', 'lanczos',
                         '--out-csv', str(tmp_path / 'bench.csv'))
        assert error.value.returncode == 2


class TestScreeCommand:
    @pytest.fixture
    def separated_edges(self, tmp_path):
        spec_file = write_spec(tmp_path / 'fuerte.json', {
            'n': 150, 'ky': 3, 'kz': 3,
            'b': [[0.9, 0.02, 0.02], [0.02, 0.9, 0.02], [0.02, 0.02, 0.9]],
            'row_sizes': [50, 50, 50], 'col_sizes': [50, 50, 50],
        })
        edges = tmp_path / 'red.tsv'
        call_command('generate', spec_file, str(edges), str(tmp_path / 'etiquetas.tsv'), '--seed', '2',
                     stdout=io.StringIO())
        return str(edges)

    def test_suggests_planted_k(self, tmp_path, separated_edges):
        out = tmp_path / 'scree.csv'
        stdout = io.StringIO()
        call_command('scree', separated_edges, '--top', '10', '--out-csv', str(out), stdout=stdout)
        assert 'K sugerido: 3' in stdout.getvalue()
        frame = pd.read_csv(out)
        assert list(frame.columns) == ['k', 'sigma', 'gap']
        assert frame['k'].tolist() == list(range(1, 11))
        assert (frame['sigma'].diff().dropna() <= 1e-9).all()
        assert pd.isna(frame['gap'].iloc[-1])

    def test_single_value_is_a_validation_failure(self, separated_edges):
        with pytest.raises(CommandError) as error:
            call_command('scree', separated_edges, '--top', '1', stdout=io.StringIO())
        assert error.value.returncode == 2


@pytest.mark.slow
class TestConsistency:
    def test_approximation_error_ordering(self):
        means = run_simulation(1, [600], 20, 0, SimulationReport()).means()
        errors = means.loc[600, 'approx_err']
        assert errors['projection'] <= errors['original'] <= errors['sampling']

    @pytest.mark.parametrize('scenario', [1, 2, 3])
    def test_misclustering_decreases_with_n(self, scenario):
        means = run_simulation(scenario, [300, 600, 1200], 20, 0, SimulationReport(), threads=4).means()
        for method in ('original', 'projection', 'sampling'):
            for column in ('row_mis', 'col_mis'):
                trend = means.xs(method, level='method')[column].tolist()
                assert trend[0] >= trend[1] >= trend[2]
        if scenario == 1:
            assert means.loc[(1200, 'original'), 'row_mis'] < 0.05
            assert means.loc[(1200, 'projection'), 'row_mis'] < 0.05
        else:
            at_largest = means.xs(1200, level='n')
            assert (at_largest['row_mis'] <= at_largest['col_mis']).all()
