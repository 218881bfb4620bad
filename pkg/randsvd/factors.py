"""
Tipos compartidos por los backends de SVD parcial.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from django.core.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class SvdFactor:
    """
    Factores de rango k: A ~ U diag(sigma) V^T, con U y V de columnas
    ortonormales y sigma no creciente.
    """
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    converged: bool = True
    iterations: int = 0

    @property
    def rank(self):
        return len(self.sigma)

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


@dataclass(frozen=True)
class ExactConfig:
    """Iteración de subespacios por bloques sobre A (el SC "original")."""
    rank: int
    tol: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(f'rank debe ser positivo, se recibió {self.rank}.')
        if self.tol <= 0 or self.max_iter < 1:
            raise ValidationError('tol debe ser positivo y max_iter al menos 1.')


@dataclass(frozen=True)
class ProjectionConfig:
    """Proyección aleatoria con sobremuestreo (r, s) y q iteraciones de potencia."""
    rank: int
    oversample_r: int = 10
    oversample_s: int = 10
    power_q: int = 2
    seed: int = 0

    def __post_init__(self):
        errors = []
        if self.rank < 1:
            errors.append(f'rank debe ser positivo, se recibió {self.rank}.')
        if self.oversample_r < 0 or self.oversample_s < 0:
            errors.append('El sobremuestreo (r, s) no puede ser negativo.')
        if self.power_q < 0:
            errors.append(f'power_q debe ser >= 0, se recibió {self.power_q}.')
        if errors:
            raise ValidationError(errors)

    def check_size(self, n):
        needed = self.rank + max(self.oversample_r, self.oversample_s)
        if needed > n:
            raise ValidationError(f'rank + max(r, s) = {needed} supera n = {n}.')


@dataclass(frozen=True)
class SamplingConfig:
    """Esparsificación con probabilidad p seguida de la SVD iterativa."""
    rank: int
    p: float = 0.7
    seed: int = 0
    tol: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        errors = []
        if self.rank < 1:
            errors.append(f'rank debe ser positivo, se recibió {self.rank}.')
        if not 0 < self.p <= 1:
            errors.append(f'p debe estar en (0, 1], se recibió {self.p}.')
        if self.tol <= 0 or self.max_iter < 1:
            errors.append('tol debe ser positivo y max_iter al menos 1.')
        if errors:
            raise ValidationError(errors)


def orthonormalize(matrix):
    """Base ortonormal de las columnas (QR reducida)."""
    Q, _ = scipy.linalg.qr(matrix, mode='economic', check_finite=False)
    return Q


def fix_signs(U, V):
    """
    Cambia el signo de cada par (U[:, j], V[:, j]) para que la entrada de
    mayor módulo de U[:, j] sea positiva.
    """
    if U.shape[1] == 0:
        return U, V
    pivots = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivots, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs
