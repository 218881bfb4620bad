import logging
from dataclasses import asdict

import pandas as pd
from django.db import transaction

from blockmodels.forms import read_spec
from blockmodels.specs import spec_to_document
from simulations.management.base import RandclustCommand, non_negative_int, positive_int, positive_int_list
from simulations.models import SimulationRecord, SimulationRun
from simulations.reports import SimulationReport, read_simulation_csv, summarize
from simulations.runner import SCENARIOS, run_simulation

logger = logging.getLogger(__name__)


class Command(RandclustCommand):
    help = 'Corre las simulaciones de consistencia (escenarios 1 a 3) y escribe un CSV por réplica'

    def add_command_arguments(self, parser):
        parser.add_argument('--scenario', type=int, choices=SCENARIOS, required=True)
        parser.add_argument('--n-list', type=positive_int_list, default=[300, 600, 1200],
                            help='Tamaños separados por coma (por defecto 300,600,1200)')
        parser.add_argument('--reps', type=positive_int, default=50)
        parser.add_argument('--seed', type=non_negative_int, default=0)
        parser.add_argument('--out-csv', required=True)
        parser.add_argument('--override-spec', default=None,
                            help='Spec JSON que reemplaza el modelo del escenario (usa su n)')
        parser.add_argument('--save', action='store_true', help='Guarda la corrida en la base de datos')

    def run(self, options):
        override = None
        n_list = options['n_list']
        if options['override_spec']:
            override = read_spec(options['override_spec'])
            if n_list != [override.n]:
                logger.warning('--override-spec fija n = %d; se ignora --n-list %s', override.n, n_list)
            n_list = [override.n]

        run = None
        on_rows = None
        if options['save']:
            run = SimulationRun.objects.create(
                scenario=options['scenario'],
                seed=options['seed'],
                n_list=n_list,
                reps=options['reps'],
                threads=options['threads'],
                override_spec=spec_to_document(override) if override else None,
            )

            def on_rows(n, rows):
                with transaction.atomic():
                    SimulationRecord.objects.bulk_create(
                        SimulationRecord(run=run, **asdict(row)) for row in rows
                    )

        report = SimulationReport(options['out_csv'])
        run_simulation(
            options['scenario'],
            n_list,
            options['reps'],
            options['seed'],
            report,
            override_spec=override,
            threads=options['threads'],
            on_rows=on_rows,
        )
        self.write_summary(read_simulation_csv(options['out_csv']))
        self.success(f'{len(report.rows)} filas escritas en {options["out_csv"]}.')
        if run is not None:
            self.success(f'Corrida #{run.pk} guardada.')

    def write_summary(self, frame):
        """Promedios por (n, método) leídos del CSV ya escrito."""
        for (n, method), row in summarize(frame).iterrows():
            error = '-' if pd.isna(row.approx_err) else f'{row.approx_err:.4f}'
            self.stdout.write(
                f'n={n:<7} {method:<18} filas {row.row_mis:.4f}  columnas {row.col_mis:.4f}  '
                f'‖Ã − P‖₂ {error}  {row.wall_ms:.1f} ms'
            )
