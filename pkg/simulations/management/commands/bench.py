from graph.edgelist import read_edge_list
from randsvd.backends import EXACT, PROJECTION, SAMPLING
from simulations.management.base import RandclustCommand, non_negative_int, positive_int
from simulations.reports import write_bench_csv
from simulations.runner import bench_backends


def backend_list(value):
    return [item.strip() for item in value.split(',') if item.strip()]


class Command(RandclustCommand):
    help = 'Mide la mediana del tiempo de SVD de cada backend sobre una lista de aristas'

    def add_command_arguments(self, parser):
        parser.add_argument('edges')
        parser.add_argument('--rank', type=positive_int, required=True)
        parser.add_argument('--backends', type=backend_list, default=[EXACT, PROJECTION, SAMPLING],
                            help='Backends separados por coma (por defecto exact,projection,sampling)')
        parser.add_argument('--reps', type=positive_int, default=20)
        parser.add_argument('--seed', type=non_negative_int, default=0)
        parser.add_argument('--out-csv', required=True)
        parser.add_argument('--oversample-r', type=non_negative_int, default=5)
        parser.add_argument('--oversample-s', type=non_negative_int, default=5)
        parser.add_argument('--power-q', type=non_negative_int, default=1)
        parser.add_argument('--sample-p', type=float, default=0.7)
        parser.add_argument('--tol', type=float, default=1e-5)
        parser.add_argument('--one-based', action='store_true')

    def run(self, options):
        graph = read_edge_list(options['edges'], one_based=options['one_based'])
        frame = bench_backends(
            graph,
            options['rank'],
            options['backends'],
            options['reps'],
            seed=options['seed'],
            oversample_r=options['oversample_r'],
            oversample_s=options['oversample_s'],
            power_q=options['power_q'],
            sample_p=options['sample_p'],
            tol=options['tol'],
        )
        write_bench_csv(frame, options['out_csv'])
        for row in frame.itertuples(index=False):
            self.stdout.write(f'{row.backend:>16}  {row.median_ms:10.2f} ms')
        self.success(f'Benchmark guardado en {options["out_csv"]}.')
