"""
Derivación de semillas reproducibles.

Todas las semillas secundarias (réplicas, backends, clustering, filas del
generador) salen de `numpy.random.SeedSequence` con la semilla maestra y
una tupla de claves enteras, así el resultado no depende del orden ni de la
cantidad de hilos.
"""
import numpy as np

# Claves fijas para los flujos internos de un co-clustering.
STREAM_BACKEND = 1
STREAM_ROWS = 2
STREAM_COLUMNS = 3
STREAM_MODEL = 4
STREAM_GRAPH = 5
STREAM_SHUFFLE = 6

SEED_MASK = 2 ** 63 - 1


def derive_seed(seed, *keys):
    """Semilla de 63 bits determinada por (seed, *keys); entra en un BigIntegerField."""
    sequence = np.random.SeedSequence([int(seed), *(int(key) for key in keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0]) & SEED_MASK


def make_rng(seed, *keys):
    """Generador PCG64 para el flujo (seed, *keys)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(key) for key in keys)]))
