"""
SVD por proyección aleatoria.

1. Matrices de prueba gaussianas Omega (n×(k+s)) y Gamma (n×(k+r)),
   sorteadas en ese orden con `standard_normal` del flujo de la semilla.
2. Sketches (AA^T)^q A Omega y (A^T A)^q A^T Gamma, re-ortonormalizando
   con QR después de cada producto por A o A^T.
3. Q y T bases ortonormales de los sketches.
4. SVD chica de Q^T A T, truncada a los k primeros tripletes.

Un sketch de rango deficiente con entradas finitas no es una falla: la QR
de Householder devuelve igual una base ortonormal, y los grafos de rango
exacto bajo o vacíos se factorizan sin reintento. Sólo cuenta como falla
un sketch, una Q o un Q^T A T con entradas no finitas.
"""
import logging

import numpy as np
import scipy.linalg

from core.exceptions import DegenerateSketchError
from core.seeding import make_rng
from graph.sparse import multiply_dense
from .factors import SvdFactor, fix_signs

logger = logging.getLogger(__name__)


class _SketchBreakdown(ArithmeticError):
    pass


def _orthonormal(matrix):
    if not np.all(np.isfinite(matrix)):
        raise _SketchBreakdown('sketch con entradas no finitas')
    Q, _ = scipy.linalg.qr(matrix, mode='economic', check_finite=False)
    if not np.all(np.isfinite(Q)):
        raise _SketchBreakdown('QR con entradas no finitas')
    return Q


def _range_basis(graph, test_matrix, power_q, transposed):
    """Base de (A A^T)^q A M, o de (A^T A)^q A^T M si `transposed`."""
    sketch = multiply_dense(graph, test_matrix, transposed=transposed)
    for _ in range(power_q):
        back = multiply_dense(graph, _orthonormal(sketch), transposed=not transposed)
        sketch = multiply_dense(graph, _orthonormal(back), transposed=transposed)
    return _orthonormal(sketch)


def _project(graph, config, rng):
    n, k = graph.n, config.rank
    omega = rng.standard_normal((n, k + config.oversample_s))
    gamma = rng.standard_normal((n, k + config.oversample_r))
    Q = _range_basis(graph, omega, config.power_q, transposed=False)
    T = _range_basis(graph, gamma, config.power_q, transposed=True)
    core = Q.T @ multiply_dense(graph, T)
    if not np.all(np.isfinite(core)):
        raise _SketchBreakdown('Q^T A T con entradas no finitas')
    U_small, sigma, Vt_small = scipy.linalg.svd(core, full_matrices=False)
    U, V = fix_signs(Q @ U_small[:, :k], T @ Vt_small[:k].T)
    return SvdFactor(U=U, sigma=np.maximum(sigma[:k], 0.0), V=V, converged=True, iterations=config.power_q)


def projection_svd(graph, config):
    """
    Factores de rango `config.rank` de A por proyección aleatoria.

    Si aparecen entradas no finitas se reintenta una vez con matrices de
    prueba nuevas; si vuelve a pasar se levanta DegenerateSketchError.
    """
    config.check_size(graph.n)
    for attempt in range(2):
        rng = make_rng(config.seed, attempt)
        try:
            return _project(graph, config, rng)
        except _SketchBreakdown as error:
            logger.warning('Sketch degenerado (intento %d, seed=%d): %s', attempt + 1, config.seed, error)
    raise DegenerateSketchError(f'No se pudo ortonormalizar el sketch tras 2 intentos (seed={config.seed}).')
