"""
Almacenamiento disperso de grafos dirigidos y los núcleos matriciales que
necesitan los backends de SVD.

El grafo guarda la matriz de adyacencia A (o su versión muestreada A^rs)
en formato CSR canónico: offsets por fila, columnas estrictamente
crecientes dentro de cada fila y valores reales positivos.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from django.core.exceptions import ValidationError

from core.conf import dense_guard
from core.exceptions import CapacityError


@dataclass(frozen=True, eq=False)
class SparseDirectedGraph:
    """
    Grafo dirigido ponderado e inmutable en formato CSR.

    Los valores son 1.0 para la adyacencia binaria y 1/p después de
    muestrear. Se puede compartir entre hilos sin copias.
    """
    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        row_offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        col_indices = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        for array in (row_offsets, col_indices, values):
            array.setflags(write=False)
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'row_offsets', row_offsets)
        object.__setattr__(self, 'col_indices', col_indices)
        object.__setattr__(self, 'values', values)
        self._validate()

    def _validate(self):
        n = self.n
        if n < 0:
            raise ValidationError('La cantidad de nodos no puede ser negativa.')
        if len(self.row_offsets) != n + 1:
            raise ValidationError(f'row_offsets debe tener n+1 = {n + 1} elementos.')
        nnz = len(self.col_indices)
        if self.row_offsets[0] != 0 or self.row_offsets[-1] != nnz or len(self.values) != nnz:
            raise ValidationError('row_offsets[n] debe coincidir con len(col_indices) y len(values).')
        if np.any(np.diff(self.row_offsets) < 0):
            raise ValidationError('row_offsets debe ser no decreciente.')
        if nnz == 0:
            return
        if self.col_indices.min() < 0 or self.col_indices.max() >= n:
            raise ValidationError(f'Hay índices de columna fuera de [0, {n}).')
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValidationError('Todos los valores deben ser reales positivos y finitos.')
        # Dentro de cada fila las columnas tienen que ser estrictamente crecientes.
        steps = np.diff(self.col_indices)
        row_starts = self.row_offsets[1:-1]
        row_starts = row_starts[(row_starts > 0) & (row_starts < nnz)]
        inside = np.ones(nnz - 1, dtype=bool)
        inside[row_starts - 1] = False
        if np.any(steps[inside] <= 0):
            raise ValidationError('Las columnas de cada fila deben estar ordenadas sin repetidos.')

    def __eq__(self, other):
        if not isinstance(other, SparseDirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f'SparseDirectedGraph(n={self.n}, nnz={self.nnz})'

    @property
    def nnz(self):
        return len(self.col_indices)

    @cached_property
    def csr(self):
        """Vista `scipy.sparse.csr_matrix` que comparte los arreglos del grafo."""
        return sp.csr_matrix((self.values, self.col_indices, self.row_offsets), shape=(self.n, self.n))

    @classmethod
    def from_scipy(cls, matrix):
        """
        Construye la forma canónica a partir de cualquier matriz dispersa de scipy.
        Los duplicados se suman: quien llama decide si antes deben colapsarse.
        """
        csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
        if csr.shape[0] != csr.shape[1]:
            raise ValidationError(f'La matriz de adyacencia debe ser cuadrada, se recibió {csr.shape}.')
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        return cls(csr.shape[0], csr.indptr, csr.indices, csr.data)

    @classmethod
    def empty(cls, n):
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))


def from_dense(matrix):
    """
    Grafo ponderado cuyos valores son las entradas positivas de `matrix`.

    Sirve para correr el pipeline sobre la matriz poblacional P.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f'Se esperaba una matriz cuadrada, se recibió forma {matrix.shape}.')
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
        raise ValidationError('La matriz debe ser finita y no negativa.')
    return SparseDirectedGraph.from_scipy(sp.csr_matrix(matrix))


def to_dense(graph):
    """Matriz densa n×n del grafo, sujeta al límite de densificación."""
    guard = dense_guard()
    if graph.n > guard:
        raise CapacityError(f'n = {graph.n} supera el límite de densificación ({guard}).')
    return graph.csr.toarray()


def transpose(graph):
    """Grafo con las aristas invertidas, en forma canónica."""
    transposed = graph.csr.T.tocsr()
    transposed.sort_indices()
    return SparseDirectedGraph(graph.n, transposed.indptr, transposed.indices, transposed.data)


def multiply_dense(graph, matrix, transposed=False):
    """
    Producto A·M (o A^T·M con `transposed`).

    scipy recorre las filas en orden fijo, así que el resultado es el mismo
    bit a bit en cada llamada.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] != graph.n:
        raise ValidationError(
            f'Dimensiones incompatibles: el grafo tiene {graph.n} nodos y M tiene {matrix.shape[0]} filas.'
        )
    operator = graph.csr.T if transposed else graph.csr
    return np.asarray(operator @ matrix)


def degrees(graph):
    """Grados de salida y de entrada (conteo de aristas, sin pesos)."""
    out_deg = np.diff(graph.row_offsets).astype(np.uint64)
    in_deg = np.bincount(graph.col_indices, minlength=graph.n).astype(np.uint64)
    return out_deg, in_deg


def permute_nodes(graph, permutation):
    """
    Renombra los nodos: el nodo i pasa a llamarse permutation[i].
    """
    permutation = np.asarray(permutation, dtype=np.int64)
    if sorted(permutation.tolist()) != list(range(graph.n)):
        raise ValidationError('La permutación debe contener cada nodo exactamente una vez.')
    coo = graph.csr.tocoo()
    relabeled = sp.coo_matrix(
        (coo.data, (permutation[coo.row], permutation[coo.col])), shape=(graph.n, graph.n)
    )
    return SparseDirectedGraph.from_scipy(relabeled)
