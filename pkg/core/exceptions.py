"""
Excepciones del proyecto.

Las fallas de validación usan `django.core.exceptions.ValidationError`
(código de salida 2 en los comandos); el resto hereda de `RandclustError`
(código de salida 1).
"""
from django.core.exceptions import ValidationError


class RandclustError(Exception):
    """Falla en tiempo de ejecución."""


class EdgeListError(ValidationError):
    """
    Línea mal formada o nodo fuera de rango en una lista de aristas.
    """
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'línea {line_number}: {message}'
        super().__init__(message, code='edge_list')
        self.line_number = line_number


class CapacityError(RandclustError):
    """La operación necesita densificar una matriz más grande que el límite configurado."""


class DegenerateModelError(RandclustError):
    """El rango numérico de P es menor que Ky."""


class DegenerateSketchError(RandclustError):
    """El sketch aleatorio no pudo ortonormalizarse ni siquiera tras reintentar."""
