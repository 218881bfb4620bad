"""
Tasa de mal clasificación con la mejor permutación de etiquetas.

Se arma la matriz de confusión k×k y se resuelve la asignación de máximo
acuerdo (método húngaro); un nodo mal asignado aporta dos entradas no
nulas a ‖ỸJ − Y‖₀, así que (1/2n)‖ỸJ − Y‖₀ es el conteo de nodos mal
asignados sobre n.
"""
import numpy as np
from django.core.exceptions import ValidationError
from scipy.optimize import linear_sum_assignment


def confusion_matrix(est, truth, k):
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (est, truth), 1)
    return confusion


def misclustering_rate(est, truth, k):
    est = np.asarray(est, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if est.shape != truth.shape or est.ndim != 1:
        raise ValidationError(f'Las etiquetas deben tener el mismo largo ({est.shape} vs {truth.shape}).')
    if est.size == 0:
        raise ValidationError('No hay nodos para evaluar.')
    for name, labels in (('estimadas', est), ('verdaderas', truth)):
        if labels.min() < 0 or labels.max() >= k:
            raise ValidationError(f'Las etiquetas {name} deben estar en [0, {k}).')
    confusion = confusion_matrix(est, truth, k)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    agreed = int(confusion[rows, cols].sum())
    return (est.size - agreed) / est.size
