# Generated by Django 5.2.5 on 2026-10-17 12:00

import django.core.validators
import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('scenario', models.PositiveSmallIntegerField(choices=[(1, 'Simulación 1: ScBM, Ky = Kz = 3'), (2, 'Simulación 2: ScBM, Ky = 2 < Kz = 3'), (3, 'Simulación 3: DC-ScBM, Ky = 2 < Kz = 3')], verbose_name='Escenario')),
                ('seed', models.PositiveBigIntegerField(verbose_name='Semilla maestra')),
                ('n_list', models.JSONField(default=list, verbose_name='Tamaños (n)')),
                ('reps', models.PositiveIntegerField(validators=[django.core.validators.MinValueValidator(1)], verbose_name='Réplicas por n')),
                ('threads', models.PositiveIntegerField(default=1, validators=[django.core.validators.MinValueValidator(1)], verbose_name='Hilos')),
                ('override_spec', models.JSONField(blank=True, help_text='Documento JSON que reemplaza el modelo del escenario', null=True, verbose_name='Spec personalizada')),
                ('created', models.DateTimeField(auto_now_add=True, verbose_name='Fecha de ejecución')),
            ],
            options={
                'verbose_name': 'Corrida de simulación',
                'verbose_name_plural': 'Corridas de simulación',
                'ordering': ['-created'],
            },
        ),
        migrations.CreateModel(
            name='SimulationRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('scenario', models.PositiveSmallIntegerField(choices=[(1, 'Simulación 1: ScBM, Ky = Kz = 3'), (2, 'Simulación 2: ScBM, Ky = 2 < Kz = 3'), (3, 'Simulación 3: DC-ScBM, Ky = 2 < Kz = 3')], verbose_name='Escenario')),
                ('n', models.PositiveIntegerField(validators=[django.core.validators.MinValueValidator(1)], verbose_name='Nodos')),
                ('rep', models.PositiveIntegerField(verbose_name='Réplica')),
                ('method', models.CharField(choices=[('original', 'Original (SVD iterativa)'), ('projection', 'Proyección aleatoria'), ('sampling', 'Muestreo aleatorio')], max_length=15, verbose_name='Método')),
                ('row_mis', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0), django.core.validators.MaxValueValidator(1.0)], verbose_name='Error de filas')),
                ('col_mis', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0), django.core.validators.MaxValueValidator(1.0)], verbose_name='Error de columnas')),
                ('approx_err', models.FloatField(blank=True, help_text='‖Ã − P‖₂; vacío cuando n supera el límite de densificación', null=True, verbose_name='Error de aproximación')),
                ('wall_ms', models.FloatField(verbose_name='Tiempo (ms)')),
                ('seed', models.PositiveBigIntegerField(verbose_name='Semilla de la réplica')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='simulations.simulationrun', verbose_name='Corrida')),
            ],
            options={
                'verbose_name': 'Registro de simulación',
                'verbose_name_plural': 'Registros de simulación',
                'ordering': ['run', 'n', 'rep', 'method'],
                'unique_together': {('run', 'n', 'rep', 'method')},
            },
        ),
    ]
