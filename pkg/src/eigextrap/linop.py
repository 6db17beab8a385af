"""Vectors, dense/CSR storage and the linear-operator contract.

Vectors are plain 1-D ``float64`` numpy arrays.  Matrix types freeze their
arrays on construction so a handle can be shared between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import SingularMatrixError, UsageError

__all__ = [
    "dot",
    "norm",
    "lincomb",
    "as_vector",
    "DenseMatrix",
    "CsrMatrix",
    "MatrixHandle",
    "LinearOperator",
    "LuFactors",
    "apply_dense",
    "apply_csr",
    "lu_factor",
    "lu_solve",
    "shift_invert_operator",
]

PIVOT_RTOL = 1e-14


def _frozen(a):
    a.setflags(write=False)
    return a


def as_vector(x, n=None):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise UsageError(f"expected a 1-D vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise UsageError(f"dimension mismatch: expected length {n}, got {v.shape[0]}")
    return v


def _check_pair(x, y):
    x = as_vector(x)
    y = as_vector(y)
    if x.shape != y.shape:
        raise UsageError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return x, y


def dot(x, y) -> float:
    x, y = _check_pair(x, y)
    return float(x @ y)


def norm(x) -> float:
    x = as_vector(x)
    with np.errstate(over="ignore", under="ignore"):
        sq = float(x @ x)
    if 1e-280 < sq < math.inf:
        return math.sqrt(sq)
    # squares under- or overflowed; rescale by the largest entry
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    y = x / scale
    return scale * math.sqrt(float(y @ y))


def lincomb(a: float, x, b: float, y) -> np.ndarray:
    """Return ``a*x + b*y``."""
    x, y = _check_pair(x, y)
    return a * x + b * y


@dataclass(frozen=True)
class DenseMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.float64, order="C")
        if a.ndim != 2 or a.size == 0:
            raise UsageError(f"dense matrix needs a non-empty 2-D array, got shape {a.shape}")
        object.__setattr__(self, "entries", _frozen(a))

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    def to_dense(self) -> np.ndarray:
        return self.entries

    def to_csr(self) -> "CsrMatrix":
        rows, cols = np.nonzero(self.entries)
        return CsrMatrix.from_coo(self.n_rows, self.n_cols, rows, cols, self.entries[rows, cols])


@dataclass(frozen=True)
class CsrMatrix:
    """Compressed sparse rows with 0-based, strictly increasing column indices per row."""

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _kernel: scipy.sparse.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_rows <= 0 or self.n_cols <= 0:
            raise UsageError("CSR dimensions must be positive")
        offsets = _frozen(np.array(self.row_offsets, dtype=np.int64))
        cols = _frozen(np.array(self.col_indices, dtype=np.int64))
        vals = _frozen(np.array(self.values, dtype=np.float64))
        if offsets.shape != (self.n_rows + 1,):
            raise UsageError("row_offsets must have length n_rows + 1")
        if offsets[0] != 0 or offsets[-1] != vals.shape[0] or cols.shape != vals.shape:
            raise UsageError("row_offsets inconsistent with stored values")
        if np.any(np.diff(offsets) < 0):
            raise UsageError("row_offsets must be nondecreasing")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_cols):
            raise UsageError("column index out of range")
        for i in range(self.n_rows):
            seg = cols[offsets[i]:offsets[i + 1]]
            if seg.size > 1 and np.any(np.diff(seg) <= 0):
                raise UsageError(f"column indices of row {i} not strictly increasing")
        object.__setattr__(self, "row_offsets", offsets)
        object.__setattr__(self, "col_indices", cols)
        object.__setattr__(self, "values", vals)
        kernel = scipy.sparse.csr_matrix((vals, cols, offsets), shape=(self.n_rows, self.n_cols))
        object.__setattr__(self, "_kernel", kernel)

    @classmethod
    def from_coo(cls, n_rows, n_cols, rows, cols, vals) -> "CsrMatrix":
        """Build from coordinate triplets, summing duplicates."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            first = np.ones(rows.size, dtype=bool)
            first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(first)
            vals = np.add.reduceat(vals, starts)
            rows, cols = rows[starts], cols[starts]
        offsets = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=offsets[1:])
        return cls(n_rows, n_cols, offsets, cols, vals)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def to_dense(self) -> np.ndarray:
        return self._kernel.toarray()

    def to_csr(self) -> "CsrMatrix":
        return self


Storage = Union[DenseMatrix, CsrMatrix]


def apply_dense(A: DenseMatrix, x) -> np.ndarray:
    x = as_vector(x, A.n_cols)
    return A.entries @ x


def apply_csr(A: CsrMatrix, x) -> np.ndarray:
    x = as_vector(x, A.n_cols)
    return A._kernel @ x


@dataclass(frozen=True)
class LinearOperator:
    """Square operator ``x -> A x`` given only by its action."""

    n: int
    matvec: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def apply(self, x) -> np.ndarray:
        x = as_vector(x, self.n)
        y = np.asarray(self.matvec(x), dtype=np.float64)
        if y.shape != (self.n,):
            raise UsageError(f"operator {self.label!r} returned shape {y.shape}")
        return y

    __call__ = apply


@dataclass(frozen=True)
class MatrixHandle:
    storage: Storage
    label: str = ""

    def __post_init__(self):
        if self.storage.n_rows != self.storage.n_cols:
            raise UsageError(f"matrix {self.label!r} is not square")

    @classmethod
    def dense(cls, entries, label="") -> "MatrixHandle":
        return cls(DenseMatrix(entries), label)

    @property
    def n(self) -> int:
        return self.storage.n_rows

    @property
    def is_sparse(self) -> bool:
        return isinstance(self.storage, CsrMatrix)

    def to_dense(self) -> np.ndarray:
        return self.storage.to_dense()

    def apply(self, x) -> np.ndarray:
        if self.is_sparse:
            return apply_csr(self.storage, x)
        return apply_dense(self.storage, x)

    def operator(self) -> LinearOperator:
        return LinearOperator(self.n, self.apply, self.label)


@dataclass(frozen=True)
class LuFactors:
    """Row-permuted ``P A = L U`` with unit-lower L and U packed in one array."""

    n: int
    lu: np.ndarray
    perm: np.ndarray


def lu_factor(A) -> LuFactors:
    """Gaussian elimination with partial pivoting.

    A pivot smaller than ``1e-14`` times the largest magnitude in the
    corresponding column of the input is treated as exactly singular.
    """
    a = np.array(A.to_dense() if hasattr(A, "to_dense") else A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"lu_factor needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    colmax = np.abs(a).max(axis=0)
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        pivot = abs(a[p, k])
        if pivot == 0.0 or pivot < PIVOT_RTOL * colmax[k]:
            raise SingularMatrixError(f"matrix is singular to working precision (column {k})")
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return LuFactors(n, _frozen(a), _frozen(perm))


def lu_solve(F: LuFactors, b) -> np.ndarray:
    b = as_vector(b, F.n)
    y = scipy.linalg.solve_triangular(F.lu, b[F.perm], lower=True, unit_diagonal=True)
    return scipy.linalg.solve_triangular(F.lu, y, lower=False)


def shift_invert_operator(K: MatrixHandle, M: MatrixHandle, shift: float) -> LinearOperator:
    """Operator ``x -> (K - shift*M)^{-1} M x``; factors once at construction.

    An eigenvalue ``theta`` of the operator maps back to ``shift + 1/theta``
    for the pencil ``K x = lambda M x``.
    """
    if K.n != M.n:
        raise UsageError(f"stiffness and mass dimensions differ: {K.n} vs {M.n}")
    factors = lu_factor(K.to_dense() - shift * M.to_dense())

    def matvec(x):
        return lu_solve(factors, M.apply(x))

    return LinearOperator(K.n, matvec, f"shift-invert({K.label}, {M.label}, {shift:g})")
