"""
Reportes CSV de simulaciones, benchmarks y valores singulares.

UTF-8, separados por comas, con encabezado, punto decimal y reales con 17
dígitos significativos. Los reportes de `simulate` se escriben de forma
incremental: primero el encabezado, después cada réplica terminada, así un
error a mitad de camino deja un CSV parcial válido.
"""
from dataclasses import astuple, dataclass

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

SIMULATION_COLUMNS = ['scenario', 'n', 'rep', 'method', 'row_mis', 'col_mis', 'approx_err', 'wall_ms', 'seed']
BENCH_COLUMNS = ['backend', 'median_ms', 'nnz', 'n', 'rank']
SCREE_COLUMNS = ['k', 'sigma', 'gap']
FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True)
class SimulationRow:
    scenario: int
    n: int
    rep: int
    method: str
    row_mis: float
    col_mis: float
    approx_err: float | None
    wall_ms: float
    seed: int

    def __post_init__(self):
        errors = []
        for name in ('row_mis', 'col_mis'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                errors.append(f'{name} debe estar en [0, 1], se recibió {value}.')
        if not self.wall_ms > 0:
            errors.append(f'wall_ms debe ser positivo, se recibió {self.wall_ms}.')
        if errors:
            raise ValidationError(errors)


def _write(frame, handle, header):
    frame.to_csv(
        handle,
        index=False,
        header=header,
        float_format=FLOAT_FORMAT,
        na_rep='',
        lineterminator='\n',
    )


def rows_frame(rows):
    """DataFrame con las columnas del reporte, en el orden documentado."""
    frame = pd.DataFrame([astuple(row) for row in rows], columns=SIMULATION_COLUMNS)
    frame['approx_err'] = frame['approx_err'].astype('float64')
    return frame


def summarize(frame):
    """Promedios por (n, método), como en los gráficos de consistencia."""
    columns = ['row_mis', 'col_mis', 'approx_err', 'wall_ms']
    return frame.groupby(['n', 'method'], sort=True)[columns].mean()


class SimulationReport:
    """
    Filas acumuladas de una corrida de `simulate`; si tiene `path`, cada
    `extend` agrega las filas nuevas al archivo.
    """

    def __init__(self, path=None):
        self.path = path
        self.rows = []
        if path is not None:
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                _write(pd.DataFrame(columns=SIMULATION_COLUMNS), handle, header=True)

    def extend(self, rows):
        rows = list(rows)
        self.rows.extend(rows)
        if self.path is not None and rows:
            with open(self.path, 'a', encoding='utf-8', newline='') as handle:
                _write(rows_frame(rows), handle, header=False)

    def to_frame(self):
        return rows_frame(self.rows)

    def means(self):
        return summarize(self.to_frame())


def read_simulation_csv(path):
    return pd.read_csv(path, encoding='utf-8', dtype={'method': str})


def write_bench_csv(frame, path):
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        _write(frame[BENCH_COLUMNS], handle, header=True)


def scree_frame(values):
    """Tabla `k,sigma,gap` de los valores singulares ordenados; el último salto queda vacío."""
    values = np.asarray(values, dtype=np.float64)
    gaps = np.append(values[:-1] - values[1:], np.nan)
    return pd.DataFrame({'k': np.arange(1, len(values) + 1), 'sigma': values, 'gap': gaps})


def write_scree_csv(frame, path):
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        _write(frame[SCREE_COLUMNS], handle, header=True)
