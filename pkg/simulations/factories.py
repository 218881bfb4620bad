import factory

from .models import SimulationRecord, SimulationRun


class SimulationRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = SimulationRun

    scenario = 1
    seed = factory.Sequence(lambda i: i)
    n_list = factory.LazyFunction(lambda: [300, 600])
    reps = 2
    threads = 1


class SimulationRecordFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = SimulationRecord

    run = factory.SubFactory(SimulationRunFactory)
    scenario = factory.SelfAttribute('run.scenario')
    n = 300
    rep = factory.Sequence(lambda i: i)
    method = 'original'
    row_mis = 0.1
    col_mis = 0.2
    approx_err = 12.5
    wall_ms = 35.0
    seed = factory.Sequence(lambda i: 1000 + i)
