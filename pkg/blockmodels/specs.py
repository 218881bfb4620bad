"""
Parámetros de los modelos de co-bloques estocásticos (ScBM y DC-ScBM).

Las membresías son bloques contiguos: los primeros row_sizes[0] nodos
forman el cluster de filas 0, y así sucesivamente (ídem columnas).
"""
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from core.seeding import STREAM_MODEL, make_rng

RANK_TOLERANCE = 1e-10


def balanced_sizes(n, k):
    """Tamaños lo más parejos posible; los primeros n % k clusters llevan un nodo más."""
    if k < 1 or n < k:
        raise ValidationError(f'No se pueden repartir {n} nodos en {k} clusters no vacíos.')
    base, extra = divmod(n, k)
    return [base + 1 if index < extra else base for index in range(k)]


def numerical_rank(matrix, tolerance=RANK_TOLERANCE):
    singular_values = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > tolerance * singular_values[0]))


def _labels_from_sizes(sizes):
    return np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)


@dataclass(frozen=True)
class MembershipPair:
    """Etiquetas verdaderas de filas (y) y columnas (z)."""
    y: np.ndarray
    z: np.ndarray

    @property
    def n(self):
        return len(self.y)


@dataclass(frozen=True, eq=False)
class ScbmSpec:
    """
    ScBM: la arista i→j es Bernoulli(B[y_i, z_j]) para i != j.

    La validación estructural ocurre al construir. rank(B) == ky se
    verifica aparte con `check_rank`, porque un B degenerado todavía se
    puede muestrear (por ejemplo B = 0 da el grafo vacío).
    """
    n: int
    ky: int
    kz: int
    b: np.ndarray
    row_sizes: tuple
    col_sizes: tuple

    def __post_init__(self):
        b = np.array(self.b, dtype=np.float64, ndmin=2)
        b.setflags(write=False)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'row_sizes', tuple(int(size) for size in self.row_sizes))
        object.__setattr__(self, 'col_sizes', tuple(int(size) for size in self.col_sizes))
        errors = self._structural_errors()
        if errors:
            raise ValidationError(errors)

    def _structural_errors(self):
        errors = []
        if self.n < 1:
            errors.append(f'n debe ser positivo (n = {self.n}).')
        if self.ky < 1 or self.kz < 1:
            errors.append('ky y kz deben ser positivos.')
        if self.ky > self.kz:
            errors.append(f'Se requiere ky <= kz (ky = {self.ky}, kz = {self.kz}).')
        if self.b.shape != (self.ky, self.kz):
            errors.append(f'b debe ser {self.ky}×{self.kz}, se recibió {self.b.shape[0]}×{self.b.shape[1]}.')
        elif not np.all(np.isfinite(self.b)) or np.any(self.b < 0) or np.any(self.b > 1):
            errors.append('Todas las entradas de b deben estar en [0, 1].')
        for name, sizes, k in (('row_sizes', self.row_sizes, self.ky), ('col_sizes', self.col_sizes, self.kz)):
            if len(sizes) != k:
                errors.append(f'{name} debe tener {k} elementos, tiene {len(sizes)}.')
            if any(size < 1 for size in sizes):
                errors.append(f'{name} debe contener enteros positivos.')
            if sum(sizes) != self.n:
                errors.append(f'{name} debe sumar n = {self.n} (suma {sum(sizes)}).')
        return errors

    def check_rank(self):
        """ValidationError si rank(B) != ky con tolerancia relativa 1e-10."""
        rank = numerical_rank(self.b)
        if rank != self.ky:
            raise ValidationError(f'rank(b) = {rank} pero se requiere rank(b) = ky = {self.ky}.')
        return self

    @property
    def base(self):
        return self

    @property
    def alpha_n(self):
        return float(self.b.max())

    def memberships(self):
        return MembershipPair(_labels_from_sizes(self.row_sizes), _labels_from_sizes(self.col_sizes))

    def thetas(self):
        return np.ones(self.n), np.ones(self.n)


@dataclass(frozen=True, eq=False)
class DcScbmSpec:
    """
    DC-ScBM: la arista i→j es Bernoulli(theta_y[i] * theta_z[j] * B[y_i, z_j]).

    Identificabilidad: el máximo de theta_y en cada cluster de filas (y de
    theta_z en cada cluster de columnas) vale 1.
    """
    base: ScbmSpec
    theta_y: np.ndarray = field(default=None)
    theta_z: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.base.n
        theta_y = np.ones(n) if self.theta_y is None else np.array(self.theta_y, dtype=np.float64)
        theta_z = np.ones(n) if self.theta_z is None else np.array(self.theta_z, dtype=np.float64)
        theta_y.setflags(write=False)
        theta_z.setflags(write=False)
        object.__setattr__(self, 'theta_y', theta_y)
        object.__setattr__(self, 'theta_z', theta_z)
        errors = []
        memberships = self.base.memberships()
        for name, theta, labels, k in (
            ('theta_y', theta_y, memberships.y, self.base.ky),
            ('theta_z', theta_z, memberships.z, self.base.kz),
        ):
            if theta.shape != (n,):
                errors.append(f'{name} debe tener n = {n} elementos.')
                continue
            if not np.all(np.isfinite(theta)) or np.any(theta <= 0):
                errors.append(f'{name} debe ser estrictamente positivo.')
                continue
            maxima = np.array([theta[labels == cluster].max() for cluster in range(k)])
            if not np.allclose(maxima, 1.0, rtol=0, atol=1e-12):
                bad = [int(cluster) for cluster in np.flatnonzero(~np.isclose(maxima, 1.0, rtol=0, atol=1e-12))]
                errors.append(f'{name}: el máximo en cada cluster debe ser 1 (clusters {bad}).')
        if not errors:
            # P_ij = theta_y[i] theta_z[j] B[y_i, z_j] debe ser una probabilidad.
            row_peak = np.array([theta_y[memberships.y == k].max() for k in range(self.base.ky)])
            col_peak = np.array([theta_z[memberships.z == k].max() for k in range(self.base.kz)])
            if np.any(row_peak[:, None] * self.base.b * col_peak[None, :] > 1):
                errors.append('Alguna probabilidad theta_y[i] theta_z[j] B[k, l] supera 1.')
        if errors:
            raise ValidationError(errors)

    @property
    def n(self):
        return self.base.n

    @property
    def ky(self):
        return self.base.ky

    @property
    def kz(self):
        return self.base.kz

    @property
    def b(self):
        return self.base.b

    @property
    def row_sizes(self):
        return self.base.row_sizes

    @property
    def col_sizes(self):
        return self.base.col_sizes

    def check_rank(self):
        self.base.check_rank()
        return self

    def memberships(self):
        return self.base.memberships()

    def thetas(self):
        return self.theta_y, self.theta_z


def four_parameter_spec(n, K, alpha, lam):
    """
    ScBM balanceado con B = alpha*lam*I + alpha*(1-lam)*11^T: alpha en la
    diagonal y alpha*(1-lam) fuera de ella.
    """
    errors = []
    if K < 1 or n % K != 0:
        errors.append(f'K = {K} debe dividir a n = {n}.')
    if not 0 < alpha <= 1:
        errors.append(f'alpha debe estar en (0, 1], se recibió {alpha}.')
    if not 0 <= lam <= 1:
        errors.append(f'lambda debe estar en [0, 1], se recibió {lam}.')
    if errors:
        raise ValidationError(errors)
    b = alpha * lam * np.eye(K) + alpha * (1 - lam) * np.ones((K, K))
    sizes = [n // K] * K
    return ScbmSpec(n=n, ky=K, kz=K, b=b, row_sizes=sizes, col_sizes=sizes).check_rank()


def simulation_1_spec(n):
    """Ky = Kz = 3, B con 0.2 en la diagonal y 0.1 fuera de ella."""
    if n % 3 == 0:
        return four_parameter_spec(n, 3, 0.2, 0.5)
    sizes = balanced_sizes(n, 3)
    b = 0.1 * np.ones((3, 3)) + 0.1 * np.eye(3)
    return ScbmSpec(n=n, ky=3, kz=3, b=b, row_sizes=sizes, col_sizes=sizes)


def simulation_2_spec(n, seed):
    """Ky = 2 < Kz = 3 con B[k, l] ~ Uniform(0.01, 0.3) independientes."""
    rng = make_rng(seed, STREAM_MODEL)
    b = rng.uniform(0.01, 0.3, size=(2, 3))
    return ScbmSpec(n=n, ky=2, kz=3, b=b, row_sizes=balanced_sizes(n, 2), col_sizes=balanced_sizes(n, 3))


SIMULATION_3_B = ((0.2, 0.1, 0.1), (0.1, 0.2, 0.3))


def _propensities(rng, labels, k):
    # 1 con probabilidad 0.2 y 0.2 con probabilidad 0.8, reescalado para
    # que cada cluster alcance el máximo 1.
    theta = np.where(rng.random(len(labels)) < 0.2, 1.0, 0.2)
    for cluster in range(k):
        members = labels == cluster
        theta[members] /= theta[members].max()
    return theta


def simulation_3_spec(n, seed):
    """DC-ScBM con Ky = 2 < Kz = 3 y propensiones en {1, 0.2}."""
    base = ScbmSpec(
        n=n, ky=2, kz=3, b=SIMULATION_3_B, row_sizes=balanced_sizes(n, 2), col_sizes=balanced_sizes(n, 3)
    )
    rng = make_rng(seed, STREAM_MODEL)
    memberships = base.memberships()
    theta_y = _propensities(rng, memberships.y, base.ky)
    theta_z = _propensities(rng, memberships.z, base.kz)
    return DcScbmSpec(base=base, theta_y=theta_y, theta_z=theta_z)


def spec_to_document(spec):
    """Documento JSON {n, ky, kz, b, row_sizes, col_sizes, theta_y?, theta_z?}."""
    document = {
        'n': spec.n,
        'ky': spec.ky,
        'kz': spec.kz,
        'b': spec.b.tolist(),
        'row_sizes': list(spec.row_sizes),
        'col_sizes': list(spec.col_sizes),
    }
    if isinstance(spec, DcScbmSpec):
        document['theta_y'] = spec.theta_y.tolist()
        document['theta_z'] = spec.theta_z.tolist()
    return document
