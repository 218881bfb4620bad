from graph.edgelist import read_edge_list
from randsvd.scree import eigengap, leading_singular_values
from simulations.management.base import RandclustCommand, positive_int
from simulations.reports import scree_frame, write_scree_csv


class Command(RandclustCommand):
    help = 'Valores singulares dominantes de una lista de aristas y K sugerido por el mayor salto'

    def add_command_arguments(self, parser):
        parser.add_argument('edges')
        parser.add_argument('--top', type=positive_int, default=50, help='Cantidad de valores singulares')
        parser.add_argument('--max-k', type=positive_int, default=None,
                            help='Mayor K considerado al buscar el salto')
        parser.add_argument('--out-csv', default=None)
        parser.add_argument('--tol', type=float, default=1e-8)
        parser.add_argument('--max-iter', type=positive_int, default=1000)
        parser.add_argument('--nodes', type=positive_int, default=None)
        parser.add_argument('--one-based', action='store_true')

    def run(self, options):
        graph = read_edge_list(options['edges'], n_hint=options['nodes'], one_based=options['one_based'])
        values = leading_singular_values(graph, options['top'], tol=options['tol'], max_iter=options['max_iter'])
        frame = scree_frame(values)
        for row in frame.itertuples(index=False):
            self.stdout.write(f'{row.k:>4}  {row.sigma:14.6f}')
        if options['out_csv']:
            write_scree_csv(frame, options['out_csv'])
        self.success(f'K sugerido: {eigengap(values, options["max_k"])}')
