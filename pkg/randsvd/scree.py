"""
Valores singulares dominantes de A y elección de K por el mayor salto
entre valores consecutivos.
"""
import numpy as np
from django.core.exceptions import ValidationError

from .iterative import iterative_partial_svd


def leading_singular_values(graph, count, tol=1e-8, max_iter=1000):
    """Los `count` mayores valores singulares (a lo sumo n), en orden decreciente."""
    if count < 1:
        raise ValidationError(f'count debe ser positivo, se recibió {count}.')
    factors = iterative_partial_svd(graph, min(count, graph.n), tol=tol, max_iter=max_iter)
    return factors.sigma.copy()


def eigengap(values, max_k=None):
    """
    K tal que σ_K − σ_{K+1} es el mayor salto; con `max_k` sólo se miran
    K <= max_k. Ante empates gana el K más chico.
    """
    values = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    if values.size < 2:
        raise ValidationError('Se necesitan al menos dos valores singulares para medir un salto.')
    gaps = values[:-1] - values[1:]
    if max_k is not None:
        gaps = gaps[:max(1, max_k)]
    return int(np.argmax(gaps)) + 1
