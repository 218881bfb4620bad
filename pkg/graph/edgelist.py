"""
Lectura y escritura de listas de aristas.

Formato: texto UTF-8, un par `src<TAB>dst` por línea con ids decimales
base 0; las líneas que empiezan con `#` y las vacías se ignoran. Las
aristas repetidas colapsan en una sola con valor 1.
"""
import io
import logging

import numpy as np
import scipy.sparse as sp

from core.exceptions import EdgeListError
from .sparse import SparseDirectedGraph

logger = logging.getLogger(__name__)


def _lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    for raw in source:
        if isinstance(raw, (bytes, bytearray)):
            raw = raw.decode('utf-8')
        yield raw


def _parse_node(token, line_number, one_based):
    if not (token.isascii() and token.isdigit()):
        raise EdgeListError(f'"{token}" no es un id de nodo entero no negativo.', line_number)
    node = int(token)
    if one_based:
        if node == 0:
            raise EdgeListError('el id 0 no es válido con --one-based.', line_number)
        node -= 1
    return node


def from_edge_list(source, n_hint=None, one_based=False):
    """
    Construye un grafo canónico desde un flujo de bytes (o líneas de texto).

    n es max(id)+1, o n_hint si es mayor. Con n_hint, cualquier id >= n_hint
    es un error de rango.
    """
    sources, targets = [], []
    for line_number, line in enumerate(_lines(source), start=1):
        text = line.strip()
        if not text or text.startswith('#'):
            continue
        tokens = text.split()
        if len(tokens) != 2:
            raise EdgeListError(f'se esperaban 2 campos (src, dst) y hay {len(tokens)}.', line_number)
        src = _parse_node(tokens[0], line_number, one_based)
        dst = _parse_node(tokens[1], line_number, one_based)
        if n_hint is not None and max(src, dst) >= n_hint:
            raise EdgeListError(f'el nodo {max(src, dst)} está fuera de rango para n = {n_hint}.', line_number)
        sources.append(src)
        targets.append(dst)

    max_id = max(max(sources, default=-1), max(targets, default=-1))
    n = max(max_id + 1, n_hint or 0)
    if not sources:
        return SparseDirectedGraph.empty(n)

    keys = np.unique(np.asarray(sources, dtype=np.int64) * n + np.asarray(targets, dtype=np.int64))
    if len(keys) < len(sources):
        logger.debug('Se colapsaron %d aristas repetidas', len(sources) - len(keys))
    rows, cols = np.divmod(keys, n)
    adjacency = sp.coo_matrix((np.ones(len(keys)), (rows, cols)), shape=(n, n))
    return SparseDirectedGraph.from_scipy(adjacency)


def read_edge_list(path, n_hint=None, one_based=False):
    with open(path, 'rb') as handle:
        return from_edge_list(handle, n_hint=n_hint, one_based=one_based)


def to_edge_list(graph, sink):
    """
    Escribe las aristas ordenadas por (src, dst) como líneas `src<TAB>dst`.
    Los pesos no se escriben: el formato describe adyacencias binarias.
    """
    sources = np.repeat(np.arange(graph.n, dtype=np.int64), np.diff(graph.row_offsets))
    for src, dst in zip(sources.tolist(), graph.col_indices.tolist()):
        sink.write(f'{src}\t{dst}\n'.encode('utf-8'))


def write_edge_list(graph, path):
    with open(path, 'wb') as handle:
        to_edge_list(graph, handle)
