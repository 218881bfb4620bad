"""
Despacho de backends por tipo de configuración.
"""
from django.core.exceptions import ValidationError

from .factors import ExactConfig, ProjectionConfig, SamplingConfig
from .iterative import iterative_partial_svd
from .projection import projection_svd
from .sampling import sampling_svd

EXACT = 'exact'
PROJECTION = 'projection'
SAMPLING = 'sampling'

BACKEND_CHOICES = [
    (EXACT, 'Iterativa exacta (SC original)'),
    (PROJECTION, 'Proyección aleatoria'),
    (SAMPLING, 'Muestreo aleatorio'),
]


def backend_name(config):
    if isinstance(config, ExactConfig):
        return EXACT
    if isinstance(config, ProjectionConfig):
        return PROJECTION
    if isinstance(config, SamplingConfig):
        return SAMPLING
    raise ValidationError(f'Configuración de backend desconocida: {config!r}')


def make_config(backend, rank, seed=0, oversample_r=10, oversample_s=10, power_q=2, sample_p=0.7,
                tol=1e-8, max_iter=1000):
    """Configuración del backend pedido con los parámetros por defecto de las simulaciones."""
    if backend == EXACT:
        return ExactConfig(rank=rank, tol=tol, max_iter=max_iter)
    if backend == PROJECTION:
        return ProjectionConfig(
            rank=rank, oversample_r=oversample_r, oversample_s=oversample_s, power_q=power_q, seed=seed
        )
    if backend == SAMPLING:
        return SamplingConfig(rank=rank, p=sample_p, seed=seed, tol=tol, max_iter=max_iter)
    valid = ', '.join(name for name, _ in BACKEND_CHOICES)
    raise ValidationError(f'Backend "{backend}" desconocido (opciones: {valid}).')


def compute_factors(graph, config):
    """SvdFactor de rango config.rank con el backend que corresponda."""
    name = backend_name(config)
    if name == EXACT:
        return iterative_partial_svd(graph, config.rank, tol=config.tol, max_iter=config.max_iter)
    if name == PROJECTION:
        return projection_svd(graph, config)
    return sampling_svd(graph, config)
