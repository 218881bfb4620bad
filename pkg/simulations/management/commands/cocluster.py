import json

from cluster.kmedian import ZERO_ROWS_CHOICES, ZERO_ROWS_RANDOM
from cluster.pipeline import KMEANS, METHOD_CHOICES, co_cluster
from core.seeding import STREAM_BACKEND, derive_seed
from graph.edgelist import read_edge_list
from randsvd.backends import BACKEND_CHOICES, PROJECTION, make_config
from simulations.management.base import RandclustCommand, non_negative_int, positive_int


def cocluster_document(result, with_timings=False):
    """Documento JSON del resultado, con orden de claves estable."""
    diagnostics = dict(result.diagnostics)
    timings = diagnostics.pop('timings')
    if with_timings:
        diagnostics['timings'] = timings
    return {
        'row_labels': result.row_labels.tolist(),
        'col_labels': result.col_labels.tolist(),
        'backend': result.backend,
        'method': result.method,
        'diagnostics': diagnostics,
    }


class Command(RandclustCommand):
    help = 'Co-clustering espectral de una lista de aristas'

    def add_command_arguments(self, parser):
        parser.add_argument('edges', help='Lista de aristas `src<TAB>dst`')
        parser.add_argument('--ky', type=positive_int, required=True, help='Clusters de filas')
        parser.add_argument('--kz', type=positive_int, required=True, help='Clusters de columnas')
        parser.add_argument('--backend', choices=[name for name, _ in BACKEND_CHOICES], default=PROJECTION)
        parser.add_argument('--method', choices=[name for name, _ in METHOD_CHOICES], default=KMEANS)
        parser.add_argument('--zero-rows', choices=[name for name, _ in ZERO_ROWS_CHOICES], default=ZERO_ROWS_RANDOM,
                            help='Filas nulas de U o V en la k-mediana: al azar o descartadas con etiqueta -1')
        parser.add_argument('--seed', type=non_negative_int, default=0)
        parser.add_argument('--out-json', default=None, help='Archivo de salida (por defecto stdout)')
        parser.add_argument('--oversample-r', type=non_negative_int, default=10)
        parser.add_argument('--oversample-s', type=non_negative_int, default=10)
        parser.add_argument('--power-q', type=non_negative_int, default=2)
        parser.add_argument('--sample-p', type=float, default=0.7)
        parser.add_argument('--tol', type=float, default=1e-8)
        parser.add_argument('--max-iter', type=positive_int, default=1000)
        parser.add_argument('--nodes', type=positive_int, default=None,
                            help='Cantidad de nodos si hay nodos aislados al final')
        parser.add_argument('--one-based', action='store_true', help='Los ids del archivo empiezan en 1')
        parser.add_argument('--with-timings', action='store_true',
                            help='Incluye los tiempos en los diagnósticos')

    def run(self, options):
        graph = read_edge_list(options['edges'], n_hint=options['nodes'], one_based=options['one_based'])
        config = make_config(
            options['backend'],
            options['ky'],
            seed=derive_seed(options['seed'], STREAM_BACKEND),
            oversample_r=options['oversample_r'],
            oversample_s=options['oversample_s'],
            power_q=options['power_q'],
            sample_p=options['sample_p'],
            tol=options['tol'],
            max_iter=options['max_iter'],
        )
        result = co_cluster(graph, options['ky'], options['kz'], config=config, method=options['method'],
                            seed=options['seed'], zero_rows=options['zero_rows'])
        payload = json.dumps(cocluster_document(result, options['with_timings'])) + '\n'
        if options['out_json'] is None:
            self.stdout.write(payload, ending='')
            return
        with open(options['out_json'], 'w', encoding='utf-8', newline='') as handle:
            handle.write(payload)
        self.success(f'Co-clustering ({result.backend}, {result.method}) guardado en {options["out_json"]}.')
