import django_tables2 as tables
from .models import SimulationRecord, SimulationRun


class SimulationRunTable(tables.Table):
    id = tables.LinkColumn('simulations:run_detail', args=[tables.A('pk')], verbose_name='Corrida')

    class Meta:
        model = SimulationRun
        fields = ['id', 'scenario', 'n_list', 'reps', 'seed', 'created']
        order_by = '-created'


class SimulationRecordTable(tables.Table):
    row_mis = tables.Column(verbose_name='Error de filas')
    col_mis = tables.Column(verbose_name='Error de columnas')
    approx_err = tables.Column(verbose_name='‖Ã − P‖₂', default='—')

    class Meta:
        model = SimulationRecord
        fields = ['n', 'rep', 'method', 'row_mis', 'col_mis', 'approx_err', 'wall_ms', 'seed']

    def render_row_mis(self, value):
        return f'{value:.4f}'

    def render_col_mis(self, value):
        return f'{value:.4f}'

    def render_approx_err(self, value):
        return f'{value:.3f}'

    def render_wall_ms(self, value):
        return f'{value:.1f}'
