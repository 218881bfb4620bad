"""
k-mediana esférica: las filas no nulas se normalizan a norma 1 y se
agrupan minimizando la suma de distancias euclídeas; los centros se
actualizan con la mediana geométrica (Weiszfeld). Las filas nulas se
asignan al azar a cualquiera de los k clusters, o se descartan con la
etiqueta DROPPED (variante para datos reales).
"""
import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial.distance import cdist

from core.seeding import make_rng
from .kmeans import ClusterAssignment, kmeans_plusplus, repair_empty, validate_embedding

ZERO_TOL = 1e-12
WEISZFELD_MAX_ITER = 50
WEISZFELD_TOL = 1e-10
# Flujo de las asignaciones aleatorias de filas nulas, separado de los reinicios.
_ZERO_ROWS_STREAM = 2 ** 31

# Etiqueta de las filas nulas descartadas.
DROPPED = -1
ZERO_ROWS_RANDOM = 'random'
ZERO_ROWS_DROP = 'drop'
ZERO_ROWS_CHOICES = [
    (ZERO_ROWS_RANDOM, 'Etiqueta al azar'),
    (ZERO_ROWS_DROP, 'Descartar (etiqueta -1)'),
]


def _distance_sum(points, center):
    return float(np.linalg.norm(points - center, axis=1).sum())


def geometric_median(points, start=None, max_iter=WEISZFELD_MAX_ITER, tol=WEISZFELD_TOL):
    """
    Mediana geométrica por iteraciones de Weiszfeld desde el centroide.

    Con `start`, devuelve el mejor entre `start` y el resultado, así el
    objetivo nunca sube respecto del centro anterior.
    """
    points = np.atleast_2d(points)
    estimate = points.mean(axis=0)
    value = _distance_sum(points, estimate)
    for _ in range(max_iter):
        distances = np.linalg.norm(points - estimate, axis=1)
        weights = 1.0 / np.maximum(distances, 1e-12)
        candidate = weights @ points / weights.sum()
        candidate_value = _distance_sum(points, candidate)
        if candidate_value > value:
            break
        step = np.linalg.norm(candidate - estimate)
        estimate, value = candidate, candidate_value
        if step < tol:
            break
    if start is not None:
        start_value = _distance_sum(points, start)
        if start_value <= value:
            return np.array(start, dtype=np.float64), start_value
    return estimate, value


def _kmedian(X, centers, max_iter):
    history = []
    labels = None
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        distances = cdist(X, centers, 'euclidean')
        new_labels = np.argmin(distances, axis=1)
        own = distances[np.arange(len(X)), new_labels]
        history.append(float(own.sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        updated = centers.copy()
        for cluster in range(len(centers)):
            members = labels == cluster
            if members.any():
                updated[cluster], _ = geometric_median(X[members], start=centers[cluster])
        centers = repair_empty(X, updated, labels, own)
    return ClusterAssignment(
        labels=new_labels,
        centers=centers,
        objective=history[-1],
        converged=converged,
        iterations=iteration,
        history=tuple(history),
    )


def spherical_kmedian(X, k, seed, max_iter=100, restarts=10, zero_tol=ZERO_TOL, zero_rows=ZERO_ROWS_RANDOM):
    """
    k-mediana sobre las filas normalizadas de X.

    Las filas con norma <= zero_tol se apartan. Con zero_rows='random'
    reciben una etiqueta uniforme en [0, k) del flujo (seed, _ZERO_ROWS_STREAM);
    con zero_rows='drop' quedan con DROPPED.
    """
    if zero_rows not in (ZERO_ROWS_RANDOM, ZERO_ROWS_DROP):
        raise ValidationError(f'zero_rows debe ser "random" o "drop", se recibió "{zero_rows}".')
    X = validate_embedding(X, 1)
    norms = np.linalg.norm(X, axis=1)
    nonzero = norms > zero_tol
    if nonzero.sum() < k:
        raise ValidationError(f'Hay {int(nonzero.sum())} filas no nulas para {k} clusters.')
    normalized = X[nonzero] / norms[nonzero, None]

    best = None
    for restart in range(max(1, restarts)):
        rng = make_rng(seed, restart)
        result = _kmedian(normalized, kmeans_plusplus(normalized, k, rng, metric='euclidean'), max_iter)
        if best is None or result.objective < best.objective:
            best = result

    labels = np.empty(len(X), dtype=np.int64)
    labels[nonzero] = best.labels
    n_zero_rows = int((~nonzero).sum())
    if n_zero_rows and zero_rows == ZERO_ROWS_DROP:
        labels[~nonzero] = DROPPED
    elif n_zero_rows:
        labels[~nonzero] = make_rng(seed, _ZERO_ROWS_STREAM).integers(0, k, size=n_zero_rows)
    return ClusterAssignment(
        labels=labels,
        centers=best.centers,
        objective=best.objective,
        converged=best.converged,
        iterations=best.iterations,
        n_zero_rows=n_zero_rows,
        history=best.history,
    )
