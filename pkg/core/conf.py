"""
Acceso a los parámetros configurables del proyecto.

Los módulos numéricos no importan `settings` directamente: pasan por estas
funciones para que los valores por defecto sigan valiendo fuera de un
proyecto configurado (por ejemplo en un shell de Django sin `.env`).
"""
from django.conf import settings

DEFAULT_DENSE_GUARD = 20000
DEFAULT_THREADS = 1


def dense_guard():
    """Cantidad máxima de nodos que se permite densificar."""
    return int(getattr(settings, 'RANDCLUST_DENSE_GUARD', DEFAULT_DENSE_GUARD))


def default_threads():
    """Hilos por defecto para réplicas concurrentes."""
    return max(1, int(getattr(settings, 'RANDCLUST_THREADS', DEFAULT_THREADS)))
