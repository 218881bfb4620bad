"""
Co-clustering espectral de punta a punta: factores de rango Ky de A con el
backend elegido, luego clustering de las filas de U en Ky grupos y de las
filas de V en Kz grupos.
"""
import logging
import time
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np
from django.core.exceptions import ValidationError

from core.seeding import STREAM_COLUMNS, STREAM_ROWS, derive_seed
from randsvd.backends import backend_name, compute_factors
from randsvd.factors import ExactConfig, SvdFactor
from .kmeans import lloyd_kmeans
from .kmedian import ZERO_ROWS_CHOICES, ZERO_ROWS_DROP, ZERO_ROWS_RANDOM, spherical_kmedian

logger = logging.getLogger(__name__)

KMEANS = 'kmeans'
SPHERICAL_KMEDIAN = 'spherical_kmedian'

METHOD_CHOICES = [
    (KMEANS, 'k-means (Lloyd)'),
    (SPHERICAL_KMEDIAN, 'k-mediana esférica'),
]

_METHODS = {
    KMEANS: lloyd_kmeans,
    SPHERICAL_KMEDIAN: spherical_kmedian,
}


@dataclass(frozen=True, eq=False)
class CoClusterResult:
    row_labels: np.ndarray
    col_labels: np.ndarray
    svd: SvdFactor
    backend: str
    method: str
    diagnostics: dict = field(default_factory=dict)


def _elapsed_ms(start):
    return (time.perf_counter() - start) * 1000.0


def co_cluster(graph, ky, kz, config=None, method=KMEANS, seed=0, zero_rows=ZERO_ROWS_RANDOM):
    """
    Co-clustering de G con Ky clusters de filas y Kz de columnas.

    `config` es ExactConfig, ProjectionConfig o SamplingConfig; su rank se
    reemplaza por Ky. Las semillas del clustering salen de `seed`, así que
    dos backends que devuelven los mismos factores dan las mismas etiquetas.

    `zero_rows='drop'` sólo vale para la k-mediana esférica: los nodos con
    fila nula en U (o V) quedan con etiqueta -1 en vez de una al azar.
    """
    if not 1 <= ky <= kz <= graph.n:
        raise ValidationError(f'Se requiere 1 <= ky <= kz <= n (ky={ky}, kz={kz}, n={graph.n}).')
    if method not in _METHODS:
        valid = ', '.join(_METHODS)
        raise ValidationError(f'Método "{method}" desconocido (opciones: {valid}).')
    if zero_rows not in dict(ZERO_ROWS_CHOICES):
        raise ValidationError(f'zero_rows "{zero_rows}" desconocido (opciones: random, drop).')
    if zero_rows == ZERO_ROWS_DROP and method != SPHERICAL_KMEDIAN:
        raise ValidationError('zero_rows="drop" requiere el método spherical_kmedian.')
    config = ExactConfig(rank=ky) if config is None else replace(config, rank=ky)
    backend = backend_name(config)
    cluster = _METHODS[method]
    if method == SPHERICAL_KMEDIAN:
        cluster = partial(cluster, zero_rows=zero_rows)

    started = time.perf_counter()
    svd = compute_factors(graph, config)
    svd_ms = _elapsed_ms(started)

    step = time.perf_counter()
    rows = cluster(svd.U, ky, derive_seed(seed, STREAM_ROWS))
    row_ms = _elapsed_ms(step)
    step = time.perf_counter()
    cols = cluster(svd.V, kz, derive_seed(seed, STREAM_COLUMNS))
    col_ms = _elapsed_ms(step)

    diagnostics = {
        'sigma': svd.sigma.tolist(),
        'svd_converged': bool(svd.converged),
        'svd_iterations': int(svd.iterations),
        'row_objective': rows.objective,
        'col_objective': cols.objective,
        'row_converged': bool(rows.converged),
        'col_converged': bool(cols.converged),
        'row_zero_rows': rows.n_zero_rows,
        'col_zero_rows': cols.n_zero_rows,
        'timings': {
            'svd_ms': svd_ms,
            'row_cluster_ms': row_ms,
            'col_cluster_ms': col_ms,
            'total_ms': _elapsed_ms(started),
        },
    }
    logger.debug('co_cluster %s/%s: n=%d, ky=%d, kz=%d, %.1f ms', backend, method, graph.n, ky, kz,
                 diagnostics['timings']['total_ms'])
    return CoClusterResult(
        row_labels=rows.labels,
        col_labels=cols.labels,
        svd=svd,
        backend=backend,
        method=method,
        diagnostics=diagnostics,
    )
