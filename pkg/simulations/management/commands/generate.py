import numpy as np
import pandas as pd

from blockmodels.forms import read_spec
from blockmodels.generators import generate
from core.seeding import STREAM_SHUFFLE, make_rng
from graph.edgelist import write_edge_list
from graph.sparse import permute_nodes
from simulations.management.base import RandclustCommand, non_negative_int


def write_labels(path, y, z):
    """Una línea `node<TAB>y<TAB>z` por nodo."""
    frame = pd.DataFrame({'node': np.arange(len(y)), 'y': y, 'z': z})
    frame.to_csv(path, sep='\t', header=False, index=False, lineterminator='\n', encoding='utf-8')


class Command(RandclustCommand):
    help = 'Genera una red ScBM o DC-ScBM a partir de un spec JSON'

    def add_command_arguments(self, parser):
        parser.add_argument('spec_file', help='Spec JSON {n, ky, kz, b, row_sizes, col_sizes, theta_y?, theta_z?}')
        parser.add_argument('out_edges', help='Archivo de salida con la lista de aristas')
        parser.add_argument('out_labels', help='Archivo de salida con las etiquetas verdaderas')
        parser.add_argument('--seed', type=non_negative_int, default=0)
        parser.add_argument(
            '--shuffle-labels',
            action='store_true',
            help='Permuta los ids de nodo (con la misma semilla) antes de escribir',
        )

    def run(self, options):
        spec = read_spec(options['spec_file'])
        graph, memberships = generate(spec, options['seed'], threads=options['threads'])
        y, z = memberships.y, memberships.z
        if options['shuffle_labels']:
            permutation = make_rng(options['seed'], STREAM_SHUFFLE).permutation(spec.n)
            graph = permute_nodes(graph, permutation)
            # el nodo i pasa a ser permutation[i]
            y = np.empty_like(memberships.y)
            z = np.empty_like(memberships.z)
            y[permutation] = memberships.y
            z[permutation] = memberships.z
        write_edge_list(graph, options['out_edges'])
        write_labels(options['out_labels'], y, z)
        self.success(f'Red generada: n = {graph.n}, {graph.nnz} aristas.')
