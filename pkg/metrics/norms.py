"""
Norma espectral y error de aproximación ‖Ã − P‖₂.

La norma es la raíz del mayor autovalor de la matriz de Gram (M^T M o
M M^T, la más chica) por Lanczos (ARPACK) desde un vector inicial sembrado.
Si ARPACK no converge se sigue con iteración de potencia desde ese mismo
vector, que se detiene sólo cuando el residuo de Rayleigh es <= tol·λ.
"""
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg
from django.core.exceptions import ValidationError
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from core.conf import dense_guard
from core.exceptions import CapacityError
from graph.sparse import SparseDirectedGraph, to_dense
from randsvd.factors import SvdFactor

logger = logging.getLogger(__name__)

_START_SEED = 7
# Por debajo de este lado la SVD densa es directa.
_DIRECT_SIZE = 3


class NormEstimate(NamedTuple):
    value: float
    converged: bool
    iterations: int


def _validate(M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValidationError('Se esperaba una matriz.')
    if not np.all(np.isfinite(M)):
        raise ValidationError('La matriz tiene entradas no finitas.')
    return M


def _gram(M):
    """Gram del lado chico como LinearOperator, con contador de productos."""
    side = M if M.shape[0] >= M.shape[1] else M.T
    calls = [0]

    def matvec(vector):
        calls[0] += 1
        return side.T @ (side @ np.ravel(vector))

    operator = LinearOperator((side.shape[1], side.shape[1]), matvec=matvec, dtype=np.float64)
    return operator, calls


def _start_vector(size):
    return np.random.default_rng(_START_SEED).uniform(-1.0, 1.0, size)


def power_iteration_norm(M, tol=1e-9, max_iter=5000):
    """
    ‖M‖₂ por iteración de potencia sobre la matriz de Gram.

    Converge cuando ‖G v − ρ v‖ <= tol·ρ: hay un autovalor de G a distancia
    relativa tol de ρ, y el valor singular queda a tol/2.
    """
    M = _validate(M)
    if M.size == 0 or not M.any():
        return NormEstimate(0.0, True, 0)
    gram, _ = _gram(M)
    vector = _start_vector(gram.shape[0])
    vector /= np.linalg.norm(vector)
    rayleigh = 0.0
    for iteration in range(1, max_iter + 1):
        image = gram.matvec(vector)
        rayleigh = float(vector @ image)
        size = np.linalg.norm(image)
        if size == 0:
            return NormEstimate(0.0, True, iteration)
        if np.linalg.norm(image - rayleigh * vector) <= tol * rayleigh:
            return NormEstimate(float(np.sqrt(rayleigh)), True, iteration)
        vector = image / size
    return NormEstimate(float(np.sqrt(max(rayleigh, 0.0))), False, max_iter)


def estimate_spectral_norm(M, tol=1e-9, max_iter=5000):
    """
    Mayor valor singular de M con (valor, convergió, productos por la Gram).

    Error relativo <= tol cuando converge.
    """
    M = _validate(M)
    if M.size == 0 or not M.any():
        return NormEstimate(0.0, True, 0)
    if min(M.shape) < _DIRECT_SIZE:
        return NormEstimate(float(scipy.linalg.svdvals(M)[0]), True, 0)
    gram, calls = _gram(M)
    try:
        values = eigsh(gram, k=1, which='LA', tol=tol, maxiter=max_iter,
                       v0=_start_vector(gram.shape[0]), return_eigenvectors=False)
    except ArpackNoConvergence:
        logger.debug('ARPACK no convergió en %d productos; se sigue con iteración de potencia', calls[0])
        return power_iteration_norm(M, tol=tol, max_iter=max_iter)
    return NormEstimate(float(np.sqrt(max(values.max(), 0.0))), True, calls[0])


def spectral_norm(M, tol=1e-9, max_iter=5000):
    """‖M‖₂; si no converge devuelve la mejor estimación y lo deja en el log."""
    estimate = estimate_spectral_norm(M, tol=tol, max_iter=max_iter)
    if not estimate.converged:
        logger.warning('La norma espectral no convergió en %d iteraciones (estimación %.6g)',
                       estimate.iterations, estimate.value)
    return estimate.value


def approximation_error(approx, P):
    """
    ‖Ã − P‖₂ donde Ã es U diag(sigma) V^T para factores, o el grafo
    densificado (A o A^rs).
    """
    P = np.asarray(P, dtype=np.float64)
    guard = dense_guard()
    if P.shape[0] > guard:
        raise CapacityError(f'n = {P.shape[0]} supera el límite de densificación ({guard}).')
    if isinstance(approx, SvdFactor):
        dense = approx.reconstruct()
    elif isinstance(approx, SparseDirectedGraph):
        dense = to_dense(approx)
    else:
        dense = np.asarray(approx, dtype=np.float64)
    if dense.shape != P.shape:
        raise ValidationError(f'Dimensiones incompatibles: Ã es {dense.shape} y P es {P.shape}.')
    return spectral_norm(dense - P)


def subspace_distance(first, second):
    """Seno del mayor ángulo principal entre los espacios columna."""
    angles = scipy.linalg.subspace_angles(np.asarray(first), np.asarray(second))
    return float(np.sin(angles.max())) if angles.size else 0.0
