"""
Matriz poblacional P y las cantidades poblacionales que usan las cotas
teóricas: vectores singulares, separaciones tau y delta, heterogeneidades
kappa y el coseno máximo eta.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.conf import dense_guard
from core.exceptions import CapacityError, DegenerateModelError
from randsvd.factors import fix_signs
from .specs import RANK_TOLERANCE


@dataclass(frozen=True, eq=False)
class PopulationStructure:
    """
    SVD truncada de P (rango ky) con las cantidades derivadas.

    `right_directions[k]` es la fila (B~[:, k])^T L Sigma^{-1}, donde B~ = L Sigma R^T;
    las filas de V_bar en el cluster de columnas k son múltiplos positivos
    de ella.
    """
    U_bar: np.ndarray
    V_bar: np.ndarray
    sigma: np.ndarray
    tau: float
    delta: float
    kappa_y: np.ndarray
    kappa_z: np.ndarray
    eta: float
    alpha_n: float
    b_tilde: np.ndarray
    right_directions: np.ndarray
    row_sizes: tuple
    col_sizes: tuple

    @property
    def sigma_n(self):
        return float(self.sigma[0])

    @property
    def gamma_n(self):
        return float(self.sigma[-1])


def population_matrix(spec):
    """P = diag(theta_y) Y B Z^T diag(theta_z), diagonal incluida."""
    guard = dense_guard()
    if spec.n > guard:
        raise CapacityError(f'n = {spec.n} supera el límite de densificación de P ({guard}).')
    memberships = spec.memberships()
    theta_y, theta_z = spec.thetas()
    return theta_y[:, None] * spec.b[np.ix_(memberships.y, memberships.z)] * theta_z[None, :]


def _cosine_matrix(rows):
    norms = np.linalg.norm(rows, axis=1)
    return (rows @ rows.T) / np.outer(norms, norms)


def _min_pairwise(values):
    return min(values) if values else float('inf')


def population_structure(spec):
    """Cantidades poblacionales a partir de la SVD densa exacta de P."""
    P = population_matrix(spec)
    U, s, Vt = scipy.linalg.svd(P, full_matrices=False)
    ky, kz = spec.ky, spec.kz
    if s[0] == 0 or s[ky - 1] <= RANK_TOLERANCE * s[0]:
        rank = 0 if s[0] == 0 else int(np.sum(s > RANK_TOLERANCE * s[0]))
        raise DegenerateModelError(f'El rango numérico de P es {rank} < ky = {ky}.')
    U_bar, V_bar = fix_signs(U[:, :ky], Vt[:ky].T)
    sigma = s[:ky]

    row_sizes = np.asarray(spec.row_sizes, dtype=np.float64)
    col_sizes = np.asarray(spec.col_sizes, dtype=np.float64)
    tau = _min_pairwise([
        np.sqrt(1 / row_sizes[k] + 1 / row_sizes[l]) for k in range(ky) for l in range(ky) if k != l
    ])
    column_gap = _min_pairwise([
        np.linalg.norm(spec.b[:, k] - spec.b[:, l]) for k in range(kz) for l in range(kz) if k != l
    ])
    delta = column_gap * np.sqrt(row_sizes.min()) / sigma[0]

    memberships = spec.memberships()
    theta_y, theta_z = spec.thetas()
    psi_y = np.array([np.linalg.norm(theta_y[memberships.y == k]) for k in range(ky)])
    psi_z = np.array([np.linalg.norm(theta_z[memberships.z == k]) for k in range(kz)])
    theta_y_tilde = theta_y / psi_y[memberships.y]
    theta_z_tilde = theta_z / psi_z[memberships.z]
    b_tilde = psi_y[:, None] * spec.b * psi_z[None, :]

    # Los valores singulares de B~ son los de P; L fija la base en la que
    # las filas de V_bar son (B~[:, k])^T L Sigma^{-1}.
    L, d, _ = scipy.linalg.svd(b_tilde, full_matrices=False)
    right_directions = (b_tilde.T @ L) / d

    kappa_y = np.array([
        np.sum(theta_y_tilde[memberships.y == k] ** -2.0) / row_sizes[k] ** 2 for k in range(ky)
    ])
    kappa_z = np.array([
        np.sum(theta_z_tilde[memberships.z == k] ** -2.0) / col_sizes[k] ** 2
        / np.linalg.norm(right_directions[k]) ** 2
        for k in range(kz)
    ])
    if kz > 1:
        cosines = _cosine_matrix(right_directions)
        eta = float(cosines[~np.eye(kz, dtype=bool)].max())
    else:
        eta = 0.0

    return PopulationStructure(
        U_bar=U_bar,
        V_bar=V_bar,
        sigma=sigma,
        tau=float(tau),
        delta=float(delta),
        kappa_y=kappa_y,
        kappa_z=kappa_z,
        eta=eta,
        alpha_n=float(P.max()),
        b_tilde=b_tilde,
        right_directions=right_directions,
        row_sizes=spec.row_sizes,
        col_sizes=spec.col_sizes,
    )
