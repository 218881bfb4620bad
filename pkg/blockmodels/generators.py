"""
Generadores de redes ScBM y DC-ScBM.

Cada fila i usa su propio flujo aleatorio derivado de (seed, i), así que
la salida no depende del orden ni de la cantidad de hilos. Dentro de una
fila los bloques de columnas se recorren en orden: para el bloque l se
sortea la cantidad de aristas con una binomial y sus posiciones sin
reemplazo, lo que cuesta O(aristas) en lugar de O(n) sorteos por fila.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from core.seeding import STREAM_GRAPH, make_rng
from graph.sparse import SparseDirectedGraph
from .specs import DcScbmSpec

logger = logging.getLogger(__name__)


def _block_bounds(sizes):
    stops = np.cumsum(sizes)
    return list(zip((stops - np.asarray(sizes)).tolist(), stops.tolist()))


def _draw_row(rng, i, row_probabilities, col_bounds, theta_z):
    """
    Columnas de la fila i, ordenadas.

    Con theta_z, el bloque l se sortea con la probabilidad tope
    row_probabilities[l] (theta_z alcanza 1 en cada bloque) y cada
    candidato j con theta_z[j] < 1 se acepta con probabilidad theta_z[j].
    Si todos los theta valen 1 no hay sorteos de aceptación y la salida
    coincide bit a bit con el ScBM.
    """
    picked = []
    for q, (start, stop) in zip(row_probabilities, col_bounds):
        if q <= 0:
            continue
        contains_self = start <= i < stop
        size = stop - start - (1 if contains_self else 0)
        if size <= 0:
            continue
        count = rng.binomial(size, q)
        if count == 0:
            continue
        local = np.sort(rng.choice(size, size=count, replace=False))
        if contains_self:
            local[local >= i - start] += 1
        columns = local + start
        if theta_z is not None:
            weights = theta_z[columns]
            thinned = weights < 1.0
            if thinned.any():
                keep = np.ones(len(columns), dtype=bool)
                keep[thinned] = rng.random(int(thinned.sum())) < weights[thinned]
                columns = columns[keep]
        picked.append(columns)
    if not picked:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(picked)


def _generate(spec, seed, theta_y, theta_z, threads):
    memberships = spec.memberships()
    col_bounds = _block_bounds(spec.col_sizes)

    def rows_chunk(rows):
        result = []
        for i in rows:
            rng = make_rng(seed, STREAM_GRAPH, i)
            probabilities = spec.b[memberships.y[i]]
            if theta_y is not None:
                probabilities = theta_y[i] * probabilities
            result.append(_draw_row(rng, i, probabilities, col_bounds, theta_z))
        return result

    chunks = np.array_split(np.arange(spec.n), max(1, threads))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_chunk = list(pool.map(rows_chunk, chunks))
    else:
        per_chunk = [rows_chunk(chunk) for chunk in chunks]
    rows = [columns for chunk in per_chunk for columns in chunk]

    counts = np.fromiter((len(columns) for columns in rows), dtype=np.int64, count=spec.n)
    row_offsets = np.concatenate([[0], np.cumsum(counts)])
    col_indices = np.concatenate(rows) if row_offsets[-1] else np.zeros(0, dtype=np.int64)
    graph = SparseDirectedGraph(spec.n, row_offsets, col_indices, np.ones(len(col_indices)))
    logger.debug('Red generada: n=%d, nnz=%d, seed=%d', spec.n, graph.nnz, seed)
    return graph, memberships


def generate_scbm(spec, seed, threads=1):
    """Red ScBM sin lazos: a_ij ~ Bernoulli(B[y_i, z_j]) para i != j."""
    return _generate(spec.base, seed, None, None, threads)


def generate_dc_scbm(spec, seed, threads=1):
    """
    Red DC-ScBM: a_ij ~ Bernoulli(theta_y[i] theta_z[j] B[y_i, z_j]) para i != j.

    Cada arista existe o no con esa probabilidad: la adyacencia es binaria y
    las propensiones no se guardan como pesos.
    """
    if not isinstance(spec, DcScbmSpec):
        return generate_scbm(spec, seed, threads=threads)
    return _generate(spec.base, seed, spec.theta_y, spec.theta_z, threads)


def generate(spec, seed, threads=1):
    """Despacha según el tipo de spec."""
    if isinstance(spec, DcScbmSpec):
        return generate_dc_scbm(spec, seed, threads=threads)
    return generate_scbm(spec, seed, threads=threads)
