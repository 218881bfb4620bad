"""
Tasas teóricas (constantes unitarias) de error de aproximación y de mal
clasificación para los esquemas de proyección y de muestreo, en ScBM y
DC-ScBM.

Son tasas, no cotas certificadas: todas las constantes absolutas valen 1.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError


@dataclass(frozen=True)
class BoundReport:
    """Lados derechos de las cotas con constantes unitarias."""
    phi: float
    delta_term: float
    rp_row_bound: float
    rp_col_bound: float
    rs_row_bound: float
    rs_col_bound: float
    dc_rp_row_bound: float
    dc_rp_col_bound: float
    dc_rs_row_bound: float
    dc_rs_col_bound: float
    sparsity_ok: bool
    conditions: dict = field(default_factory=dict)
    label: str = 'tasa (constantes unitarias)'


def delta_term(n, alpha_n, p):
    """sqrt(n α²/p) · (1 + p^{1/4} · max(1, sqrt(1/p − 1)))."""
    return math.sqrt(n * alpha_n ** 2 / p) * (1 + p ** 0.25 * max(1.0, math.sqrt(1 / p - 1)))


def phi(n, p, alpha_n):
    """max{sqrt(n α / p), sqrt(log n) / p, Δ(n, α, p)}."""
    return max(math.sqrt(n * alpha_n / p), math.sqrt(math.log(n)) / p, delta_term(n, alpha_n, p))


def _ratio(numerator, denominator):
    if denominator == 0:
        return math.inf if numerator > 0 else 0.0
    return numerator / denominator


def theoretical_bounds(n, p, alpha_n, structure, ky, kz, sizes):
    """
    Evalúa cada lado derecho tal como está escrito, con c_i = 1.

    `sizes` es (row_sizes, col_sizes); `structure` es un PopulationStructure.
    """
    errors = []
    if n < 2:
        errors.append('n debe ser al menos 2.')
    if not 0 < p <= 1:
        errors.append(f'p debe estar en (0, 1], se recibió {p}.')
    if not 0 < alpha_n <= 1:
        errors.append(f'alpha_n debe estar en (0, 1], se recibió {alpha_n}.')
    row_sizes, col_sizes = (np.asarray(sizes[0], dtype=np.float64), np.asarray(sizes[1], dtype=np.float64))
    if len(row_sizes) != ky or len(col_sizes) != kz:
        errors.append('sizes no coincide con ky y kz.')
    if errors:
        raise ValidationError(errors)

    gamma = structure.gamma_n
    tau2 = structure.tau ** 2
    delta2 = structure.delta ** 2
    angle = math.sqrt(max(1.0 - structure.eta, 0.0))
    big_phi = phi(n, p, alpha_n)
    heterogeneity_y = math.sqrt(float(np.sum(row_sizes ** 2 * structure.kappa_y)))
    heterogeneity_z = math.sqrt(float(np.sum(col_sizes ** 2 * structure.kappa_z)))
    min_row, min_col = row_sizes.min(), col_sizes.min()

    report = BoundReport(
        phi=big_phi,
        delta_term=delta_term(n, alpha_n, p),
        rp_row_bound=_ratio(ky * alpha_n, tau2 * gamma ** 2),
        rp_col_bound=_ratio(ky * alpha_n, delta2 * gamma ** 2),
        rs_row_bound=_ratio(ky * big_phi ** 2, n * tau2 * gamma ** 2),
        rs_col_bound=_ratio(ky * big_phi ** 2, n * delta2 * gamma ** 2),
        dc_rp_row_bound=_ratio(heterogeneity_y * math.sqrt(ky * alpha_n), gamma * math.sqrt(n)),
        dc_rp_col_bound=_ratio(heterogeneity_z * math.sqrt(ky * alpha_n), angle * gamma * math.sqrt(n)),
        dc_rs_row_bound=_ratio(heterogeneity_y * math.sqrt(ky) * big_phi, gamma * n),
        dc_rs_col_bound=_ratio(heterogeneity_z * math.sqrt(ky) * big_phi, angle * gamma * n),
        sparsity_ok=alpha_n >= math.log(n) / n,
        conditions={
            'C1': _ratio(math.log(n) / n, alpha_n),
            'C2': _ratio(ky * alpha_n * n, min_row * tau2 * gamma ** 2),
            'C3': _ratio(ky * alpha_n * n, min_col * delta2 * gamma ** 2),
            'C4': _ratio(ky * big_phi ** 2, min_row * tau2 * gamma ** 2),
            'C5': _ratio(ky * big_phi ** 2, min_col * delta2 * gamma ** 2),
            'C6': _ratio(heterogeneity_y * math.sqrt(ky * alpha_n * n), gamma * min_row),
            'C7': _ratio(heterogeneity_z * math.sqrt(ky * alpha_n * n), angle * gamma * min_col),
            'C8': _ratio(heterogeneity_y * math.sqrt(ky) * big_phi, gamma * min_row),
            'C9': _ratio(heterogeneity_z * math.sqrt(ky) * big_phi, angle * gamma * min_col),
        },
    )
    return report
