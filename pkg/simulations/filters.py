import django_filters
from .models import SimulationRecord


class SimulationRecordFilter(django_filters.FilterSet):
    """
    Filtro de filas de una corrida por método, tamaño y réplica.
    """
    method = django_filters.ChoiceFilter(choices=SimulationRecord.METODO_CHOICES, label='Método')
    n = django_filters.NumberFilter(label='Nodos')
    row_mis_max = django_filters.NumberFilter(field_name='row_mis', lookup_expr='lte', label='Error de filas ≤')

    class Meta:
        model = SimulationRecord
        fields = ['method', 'n', 'rep']
