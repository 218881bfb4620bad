"""
k-means de Lloyd con siembra k-means++ y reinicios.
"""
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial.distance import cdist

from core.seeding import make_rng


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """
    Resultado de un clustering de m filas en k grupos.

    `history` guarda el objetivo de cada iteración del mejor reinicio.
    """
    labels: np.ndarray
    centers: np.ndarray
    objective: float
    converged: bool
    iterations: int = 0
    n_zero_rows: int = 0
    history: tuple = field(default=())


def validate_embedding(X, k, name='X'):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f'{name} debe ser una matriz m×d.')
    if not np.all(np.isfinite(X)):
        raise ValidationError(f'{name} tiene entradas no finitas.')
    if k < 1:
        raise ValidationError(f'k debe ser positivo, se recibió {k}.')
    if X.shape[0] < k:
        raise ValidationError(f'Hay {X.shape[0]} filas para {k} clusters: se necesitan m >= k.')
    return X


def kmeans_plusplus(X, k, rng, metric='sqeuclidean'):
    """Centros iniciales elegidos entre los puntos con probabilidad proporcional a D²."""
    m = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(m)]
    closest = cdist(X, centers[:1], metric).ravel()
    if metric == 'euclidean':
        closest = closest ** 2
    for index in range(1, k):
        total = closest.sum()
        choice = rng.integers(m) if total <= 0 else rng.choice(m, p=closest / total)
        centers[index] = X[choice]
        fresh = cdist(X, centers[index:index + 1], metric).ravel()
        if metric == 'euclidean':
            fresh = fresh ** 2
        closest = np.minimum(closest, fresh)
    return centers


def repair_empty(X, centers, labels, distances):
    """
    Cada cluster vacío recibe como centro el punto más lejano a su propio
    centro; un mismo punto no se usa dos veces.
    """
    counts = np.bincount(labels, minlength=len(centers))
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return centers
    remaining = distances.copy()
    for cluster in empty:
        farthest = int(np.argmax(remaining))
        centers[cluster] = X[farthest]
        remaining[farthest] = -np.inf
    return centers


def _lloyd(X, centers, max_iter):
    history = []
    labels = None
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        squared = cdist(X, centers, 'sqeuclidean')
        new_labels = np.argmin(squared, axis=1)
        own = squared[np.arange(len(X)), new_labels]
        history.append(float(own.sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        updated = centers.copy()
        for cluster in range(len(centers)):
            members = labels == cluster
            if members.any():
                updated[cluster] = X[members].mean(axis=0)
        centers = repair_empty(X, updated, labels, own)
    return ClusterAssignment(
        labels=new_labels,
        centers=centers,
        objective=history[-1],
        converged=converged,
        iterations=iteration,
        history=tuple(history),
    )


def lloyd_kmeans(X, k, seed, max_iter=100, restarts=10):
    """
    Mejor de `restarts` corridas de Lloyd según la suma de distancias al
    cuadrado. El reinicio r usa el flujo (seed, r).
    """
    X = validate_embedding(X, k)
    best = None
    for restart in range(max(1, restarts)):
        rng = make_rng(seed, restart)
        result = _lloyd(X, kmeans_plusplus(X, k, rng), max_iter)
        if best is None or result.objective < best.objective:
            best = result
    return best
