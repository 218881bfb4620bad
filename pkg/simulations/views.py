from django.shortcuts import get_object_or_404
from django_filters.views import FilterView
from django_tables2 import SingleTableMixin, SingleTableView
from .filters import SimulationRecordFilter
from .models import SimulationRecord, SimulationRun
from .tables import SimulationRecordTable, SimulationRunTable


class SimulationRunListView(SingleTableView):
    """Lista de corridas guardadas - Acceso público"""
    model = SimulationRun
    table_class = SimulationRunTable
    template_name = 'simulations/run_list.html'
    paginate_by = 20


class SimulationRunDetailView(SingleTableMixin, FilterView):
    """
    Detalle de una corrida: promedios por (n, método) y las filas por
    réplica con filtros.
    """
    model = SimulationRecord
    table_class = SimulationRecordTable
    filterset_class = SimulationRecordFilter
    template_name = 'simulations/run_detail.html'
    paginate_by = 30

    def get_queryset(self):
        self.run = get_object_or_404(SimulationRun, pk=self.kwargs['pk'])
        return self.run.records.all()

    def get_context_data(self, **kwargs):
        context = super().get_context_data(**kwargs)
        context['run'] = self.run
        context['resumen'] = self.run.summary()
        return context
