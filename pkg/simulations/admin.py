from django.contrib import admin
from .models import SimulationRecord, SimulationRun


class SimulationRecordInline(admin.TabularInline):
    """
    Inline con las filas de la corrida en el admin.
    """
    model = SimulationRecord
    extra = 0
    fields = ['n', 'rep', 'method', 'row_mis', 'col_mis', 'approx_err', 'wall_ms', 'seed']
    readonly_fields = fields
    can_delete = False


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'scenario', 'n_list', 'reps', 'seed', 'created', 'get_records_count']
    list_filter = ['scenario', 'created']
    ordering = ['-created']
    date_hierarchy = 'created'
    inlines = [SimulationRecordInline]

    def get_records_count(self, obj):
        """Cantidad de filas guardadas"""
        return obj.records.count()
    get_records_count.short_description = 'Registros'


@admin.register(SimulationRecord)
class SimulationRecordAdmin(admin.ModelAdmin):
    list_display = ['run', 'n', 'rep', 'method', 'row_mis', 'col_mis', 'approx_err', 'wall_ms']
    list_filter = ['scenario', 'method', 'n']
    search_fields = ['seed']
    ordering = ['run', 'n', 'rep', 'method']
