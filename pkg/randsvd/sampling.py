"""
SVD por muestreo aleatorio: cada arista existente se conserva con
probabilidad p y su valor pasa a ser A_ij / p, luego SVD iterativa.
"""
import logging

import numpy as np
from django.core.exceptions import ValidationError

from core.seeding import make_rng
from graph.sparse import SparseDirectedGraph
from .iterative import iterative_partial_svd

logger = logging.getLogger(__name__)


def sparsify(graph, p, seed):
    """
    A^rs: un sorteo uniforme por arista, en orden CSR. Las entradas nulas
    de A siguen siendo nulas, así que el costo es O(nnz).
    """
    if not 0 < p <= 1:
        raise ValidationError(f'p debe estar en (0, 1], se recibió {p}.')
    keep = make_rng(seed).random(graph.nnz) < p
    kept_before = np.concatenate([[0], np.cumsum(keep)])
    sampled = SparseDirectedGraph(
        graph.n,
        kept_before[graph.row_offsets],
        graph.col_indices[keep],
        graph.values[keep] / p,
    )
    logger.debug('Esparsificación p=%.3f: %d de %d aristas', p, sampled.nnz, graph.nnz)
    return sampled


def sampling_svd(graph, config):
    """iterative_partial_svd(sparsify(G, p, seed), rank, tol, max_iter)."""
    sampled = sparsify(graph, config.p, config.seed)
    return iterative_partial_svd(sampled, config.rank, tol=config.tol, max_iter=config.max_iter)
