"""
SVD parcial iterativa: iteración de subespacios por bloques sobre el par
(A·, A^T·) con QR en cada paso y extracción de Ritz.

Si V es la base actual, U = orth(A V) y A^T U = V' R, entonces
U^T A V' = R^T, así que los valores de Ritz salen de la SVD chica de R^T
sin otro producto por A.
"""
import logging

import numpy as np
import scipy.linalg
from django.core.exceptions import ValidationError

from graph.sparse import multiply_dense
from .factors import SvdFactor, fix_signs, orthonormalize

logger = logging.getLogger(__name__)

# Semilla fija del bloque inicial: la salida depende sólo de (grafo, rank, tol, max_iter).
_START_SEED = 20200101


def block_size(n, rank):
    return min(n, 2 * rank + 10)


def iterative_partial_svd(graph, rank, tol=1e-8, max_iter=1000):
    """
    Los `rank` tripletes singulares dominantes de A.

    Converge cuando el mayor cambio de los valores de Ritz, relativo al
    primero, baja de `tol`. Al agotar `max_iter` devuelve la última
    iteración con `converged=False`.
    """
    n = graph.n
    if rank < 1 or rank > n:
        raise ValidationError(f'rank debe estar en [1, n = {n}], se recibió {rank}.')
    width = block_size(n, rank)
    rng = np.random.default_rng(_START_SEED)
    V = orthonormalize(rng.standard_normal((n, width)))

    previous = None
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        U = orthonormalize(multiply_dense(graph, V))
        V, R = scipy.linalg.qr(multiply_dense(graph, U, transposed=True), mode='economic', check_finite=False)
        U_small, ritz, Vt_small = scipy.linalg.svd(R.T, full_matrices=False)
        leading = ritz[:rank]
        if previous is not None:
            scale = max(float(leading[0]), np.finfo(np.float64).tiny)
            if np.max(np.abs(leading - previous)) / scale < tol:
                converged = True
                break
        previous = leading

    if converged:
        logger.debug('SVD iterativa convergió en %d iteraciones (rank=%d, n=%d)', iteration, rank, n)
    else:
        logger.warning('SVD iterativa sin converger tras %d iteraciones (rank=%d, n=%d)', max_iter, rank, n)
    U_out, V_out = fix_signs(U @ U_small[:, :rank], V @ Vt_small[:rank].T)
    return SvdFactor(U=U_out, sigma=ritz[:rank].copy(), V=V_out, converged=converged, iterations=iteration)
