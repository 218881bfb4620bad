from django.core.exceptions import ValidationError
from django.core.validators import MaxValueValidator, MinValueValidator
from django.db import models
from django.db.models import Avg, Count


class SimulationRun(models.Model):
    """
    Corrida de `simulate --save`: un escenario, una lista de n y una
    cantidad de réplicas por n.
    """
    ESCENARIO_CHOICES = [
        (1, 'Simulación 1: ScBM, Ky = Kz = 3'),
        (2, 'Simulación 2: ScBM, Ky = 2 < Kz = 3'),
        (3, 'Simulación 3: DC-ScBM, Ky = 2 < Kz = 3'),
    ]

    scenario = models.PositiveSmallIntegerField('Escenario', choices=ESCENARIO_CHOICES)
    seed = models.PositiveBigIntegerField('Semilla maestra')
    n_list = models.JSONField('Tamaños (n)', default=list)
    reps = models.PositiveIntegerField('Réplicas por n', validators=[MinValueValidator(1)])
    threads = models.PositiveIntegerField('Hilos', default=1, validators=[MinValueValidator(1)])
    override_spec = models.JSONField(
        'Spec personalizada',
        null=True,
        blank=True,
        help_text='Documento JSON que reemplaza el modelo del escenario'
    )
    created = models.DateTimeField('Fecha de ejecución', auto_now_add=True)

    class Meta:
        verbose_name = 'Corrida de simulación'
        verbose_name_plural = 'Corridas de simulación'
        ordering = ['-created']

    def __str__(self):
        sizes = ', '.join(str(n) for n in self.n_list)
        return f"Escenario {self.scenario} (n = {sizes}; {self.reps} réplicas)"

    def clean(self):
        super().clean()
        if not self.n_list or not all(isinstance(n, int) and n > 0 for n in self.n_list):
            raise ValidationError({'n_list': '⚠️ n_list debe ser una lista no vacía de enteros positivos.'})

    def summary(self):
        """Promedios por (n, método) sobre las réplicas guardadas."""
        return (
            self.records.values('n', 'method')
            .annotate(
                replicas=Count('id'),
                row_mis=Avg('row_mis'),
                col_mis=Avg('col_mis'),
                approx_err=Avg('approx_err'),
                wall_ms=Avg('wall_ms'),
            )
            .order_by('n', 'method')
        )


class SimulationRecord(models.Model):
    """
    Una fila del reporte: resultado de un método en una réplica.
    """
    METODO_CHOICES = [
        ('original', 'Original (SVD iterativa)'),
        ('projection', 'Proyección aleatoria'),
        ('sampling', 'Muestreo aleatorio'),
    ]

    run = models.ForeignKey(
        SimulationRun,
        on_delete=models.CASCADE,
        related_name='records',
        verbose_name='Corrida'
    )
    scenario = models.PositiveSmallIntegerField('Escenario', choices=SimulationRun.ESCENARIO_CHOICES)
    n = models.PositiveIntegerField('Nodos', validators=[MinValueValidator(1)])
    rep = models.PositiveIntegerField('Réplica')
    method = models.CharField('Método', max_length=15, choices=METODO_CHOICES)
    row_mis = models.FloatField(
        'Error de filas',
        validators=[MinValueValidator(0.0), MaxValueValidator(1.0)]
    )
    col_mis = models.FloatField(
        'Error de columnas',
        validators=[MinValueValidator(0.0), MaxValueValidator(1.0)]
    )
    approx_err = models.FloatField(
        'Error de aproximación',
        null=True,
        blank=True,
        help_text='‖Ã − P‖₂; vacío cuando n supera el límite de densificación'
    )
    wall_ms = models.FloatField('Tiempo (ms)')
    seed = models.PositiveBigIntegerField('Semilla de la réplica')

    class Meta:
        verbose_name = 'Registro de simulación'
        verbose_name_plural = 'Registros de simulación'
        ordering = ['run', 'n', 'rep', 'method']
        unique_together = [['run', 'n', 'rep', 'method']]

    def __str__(self):
        return f"n={self.n} rep={self.rep} {self.get_method_display()}"

    def clean(self):
        """
        Validaciones:
        1. wall_ms estrictamente positivo
        2. el escenario coincide con el de la corrida
        """
        super().clean()
        if self.wall_ms is not None and self.wall_ms <= 0:
            raise ValidationError({'wall_ms': '⚠️ El tiempo debe ser mayor que cero.'})
        if self.run_id and self.scenario != self.run.scenario:
            raise ValidationError('⚠️ El escenario del registro no coincide con el de la corrida.')
