"""
Ejecución de las simulaciones y del benchmark de backends.

Cada réplica usa la semilla derive_seed(maestra, escenario, n, rep): las
réplicas son independientes entre sí y cualquiera se puede repetir sola.
De esa semilla salen el modelo (escenarios 2 y 3), la red, las matrices
aleatorias de los backends y el clustering.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

from blockmodels.generators import generate
from blockmodels.population import population_matrix
from blockmodels.specs import DcScbmSpec, simulation_1_spec, simulation_2_spec, simulation_3_spec
from cluster.pipeline import KMEANS, SPHERICAL_KMEDIAN, co_cluster
from core.conf import dense_guard
from core.seeding import STREAM_BACKEND, STREAM_GRAPH, derive_seed
from metrics.misclustering import misclustering_rate
from metrics.norms import approximation_error
from randsvd.backends import EXACT, PROJECTION, SAMPLING, make_config
from randsvd.factors import ProjectionConfig
from randsvd.iterative import iterative_partial_svd
from randsvd.projection import projection_svd
from randsvd.sampling import sparsify
from .reports import SimulationRow

logger = logging.getLogger(__name__)

SCENARIOS = (1, 2, 3)

# Nombre en el reporte -> backend; el orden es el de las filas del CSV.
METHODS = (
    ('original', EXACT),
    ('projection', PROJECTION),
    ('sampling', SAMPLING),
)


def scenario_spec(scenario, n, seed):
    if scenario == 1:
        return simulation_1_spec(n)
    if scenario == 2:
        return simulation_2_spec(n, seed)
    if scenario == 3:
        return simulation_3_spec(n, seed)
    raise ValidationError(f'Escenario {scenario} desconocido (opciones: 1, 2, 3).')


def cluster_method(scenario, spec):
    """k-mediana esférica para DC-ScBM, k-means para ScBM."""
    if scenario == 3 or isinstance(spec, DcScbmSpec):
        return SPHERICAL_KMEDIAN
    return KMEANS


def replicate_seed(master_seed, scenario, n, rep):
    return derive_seed(master_seed, scenario, n, rep)


def run_replicate(scenario, n, rep, master_seed, override_spec=None):
    """
    Una réplica: genera la red y corre los tres métodos sobre ella.

    Devuelve una SimulationRow por método. El error de aproximación
    ‖Ã − P‖₂ sólo se calcula si n no supera el límite de densificación.
    """
    seed = replicate_seed(master_seed, scenario, n, rep)
    spec = override_spec if override_spec is not None else scenario_spec(scenario, n, seed)
    graph, truth = generate(spec, derive_seed(seed, STREAM_GRAPH))
    method = cluster_method(scenario, spec)
    P = population_matrix(spec) if spec.n <= dense_guard() else None

    rows = []
    for label, backend in METHODS:
        config = make_config(backend, spec.ky, seed=derive_seed(seed, STREAM_BACKEND))
        started = time.perf_counter()
        result = co_cluster(graph, spec.ky, spec.kz, config=config, method=method, seed=seed)
        wall_ms = (time.perf_counter() - started) * 1000.0

        approx_err = None
        if P is not None:
            if backend == EXACT:
                approx_err = approximation_error(graph, P)
            elif backend == PROJECTION:
                approx_err = approximation_error(result.svd, P)
            else:
                approx_err = approximation_error(sparsify(graph, config.p, config.seed), P)

        rows.append(SimulationRow(
            scenario=scenario,
            n=spec.n,
            rep=rep,
            method=label,
            row_mis=misclustering_rate(result.row_labels, truth.y, spec.ky),
            col_mis=misclustering_rate(result.col_labels, truth.z, spec.kz),
            approx_err=approx_err,
            wall_ms=wall_ms,
            seed=seed,
        ))
    return rows


def run_simulation(scenario, n_list, reps, seed, report, override_spec=None, threads=1, on_rows=None):
    """
    Corre reps réplicas para cada n y las agrega al reporte en orden
    (n, rep, método), sin importar el orden en que terminen los hilos.

    `on_rows(n, rows)` se llama con las filas de cada n ya completo.
    """
    if scenario not in SCENARIOS:
        raise ValidationError(f'Escenario {scenario} desconocido (opciones: 1, 2, 3).')
    if reps < 1:
        raise ValidationError(f'reps debe ser al menos 1, se recibió {reps}.')
    skipped = [n for n in n_list if n > dense_guard()]
    if skipped:
        logger.warning('Sin error de aproximación para n = %s (límite de densificación %d)',
                       skipped, dense_guard())

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for n in n_list:
            started = time.perf_counter()
            replicate = partial(run_replicate, scenario, n, master_seed=seed, override_spec=override_spec)
            replicates = executor.map(replicate, range(reps))
            rows_n = []
            for rows in replicates:
                report.extend(rows)
                rows_n.extend(rows)
            logger.info('Escenario %d, n=%d: %d réplicas en %.1f s', scenario, n, reps,
                        time.perf_counter() - started)
            if on_rows is not None:
                on_rows(n, rows_n)
    return report


def _timed_ms(function, *args, **kwargs):
    started = time.perf_counter()
    result = function(*args, **kwargs)
    return result, (time.perf_counter() - started) * 1000.0


def bench_backends(graph, rank, backends, reps, seed=0, oversample_r=5, oversample_s=5, power_q=1,
                   sample_p=0.7, tol=1e-5, max_iter=1000):
    """
    Mediana del tiempo de SVD de cada backend sobre reps repeticiones.

    Para el muestreo se informan dos filas: `sampling:total` incluye el
    esparsificado y `sampling:svd` sólo la SVD iterativa.
    """
    if reps < 1:
        raise ValidationError(f'reps debe ser al menos 1, se recibió {reps}.')
    unknown = [name for name in backends if name not in (EXACT, PROJECTION, SAMPLING)]
    if unknown:
        raise ValidationError(f'Backends desconocidos: {", ".join(unknown)}.')

    timings = {}
    for backend in backends:
        for rep in range(reps):
            rep_seed = derive_seed(seed, STREAM_BACKEND, rep)
            if backend == EXACT:
                _, elapsed = _timed_ms(iterative_partial_svd, graph, rank, tol=tol, max_iter=max_iter)
                timings.setdefault(EXACT, []).append(elapsed)
            elif backend == PROJECTION:
                config = ProjectionConfig(rank=rank, oversample_r=oversample_r, oversample_s=oversample_s,
                                          power_q=power_q, seed=rep_seed)
                _, elapsed = _timed_ms(projection_svd, graph, config)
                timings.setdefault(PROJECTION, []).append(elapsed)
            else:
                sampled, sparsify_ms = _timed_ms(sparsify, graph, sample_p, rep_seed)
                _, svd_ms = _timed_ms(iterative_partial_svd, sampled, rank, tol=tol, max_iter=max_iter)
                timings.setdefault(f'{SAMPLING}:total', []).append(sparsify_ms + svd_ms)
                timings.setdefault(f'{SAMPLING}:svd', []).append(svd_ms)
        logger.info('Benchmark %s: %d repeticiones', backend, reps)

    return pd.DataFrame(
        [
            {'backend': name, 'median_ms': float(np.median(values)), 'nnz': graph.nnz, 'n': graph.n, 'rank': rank}
            for name, values in timings.items()
        ],
        columns=['backend', 'median_ms', 'nnz', 'n', 'rank'],
    )
