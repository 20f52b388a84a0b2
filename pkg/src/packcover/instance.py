"""Packing/covering instances: storage, validation, scaling and truncation.

A packing LP ``max <c, x> s.t. Ax <= b, x >= 0`` and its covering dual
``min <b, y> s.t. A^T y >= c, y >= 0`` are normalised to the form
``b = c = 1`` with the smallest nonzero entry of ``A`` equal to one. The
:class:`ScaleMap` carried along with the scaled instance maps solutions of the
normalised problem back to the original coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadAccuracy,
    DimensionMismatch,
    EmptyColumn,
    IndexOutOfBounds,
    InvalidInstance,
    NegativeEntry,
    NonPositiveWeight,
)

__all__ = [
    "SparseNonnegMatrix",
    "RawInstance",
    "ScaleMap",
    "ScaledInstance",
    "build_raw",
    "scale",
    "truncate",
    "prepare",
    "unscale_primal",
    "unscale_dual",
    "matvec",
    "tmatvec",
    "check_accuracy",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseNonnegMatrix:
    """Nonnegative sparse matrix with both CSR and CSC views materialised.

    Build instances with :meth:`from_entries`; the arrays are read-only.
    ``csc_perm[k]`` is the CSR slot holding the ``k``-th CSC entry, so a new
    set of CSR values maps to CSC values as ``row_vals[csc_perm]``.
    """

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    row_cols: np.ndarray
    row_vals: np.ndarray
    col_ptr: np.ndarray
    col_rows: np.ndarray
    col_vals: np.ndarray
    csc_perm: np.ndarray = field(repr=False)

    @classmethod
    def from_entries(
        cls, n_rows: int, n_cols: int, entries: Iterable[Sequence[float]]
    ) -> "SparseNonnegMatrix":
        """Build from ``(i, j, v)`` triples; zeros dropped, duplicates summed."""
        n_rows, n_cols = int(n_rows), int(n_cols)
        if n_rows < 1 or n_cols < 1:
            raise InvalidInstance(f"matrix must be at least 1x1, got {n_rows}x{n_cols}")
        rows, cols, vals = [], [], []
        for entry in entries:
            i, j, v = entry
            if int(i) != i or int(j) != j:
                raise IndexOutOfBounds(f"non-integer index ({i}, {j})")
            i, j, v = int(i), int(j), float(v)
            if not (0 <= i < n_rows and 0 <= j < n_cols):
                raise IndexOutOfBounds(f"entry ({i}, {j}) outside {n_rows}x{n_cols}")
            if not math.isfinite(v):
                raise InvalidInstance(f"entry ({i}, {j}) is not finite: {v}")
            if v < 0:
                raise NegativeEntry(f"entry ({i}, {j}) is negative: {v}")
            rows.append(i)
            cols.append(j)
            vals.append(v)
        return cls._from_coo(
            n_rows,
            n_cols,
            np.asarray(rows, dtype=np.intp),
            np.asarray(cols, dtype=np.intp),
            np.asarray(vals, dtype=np.float64),
        )

    @classmethod
    def from_dense(cls, dense) -> "SparseNonnegMatrix":
        dense = np.atleast_2d(np.asarray(dense, dtype=np.float64))
        m, n = dense.shape
        ii, jj = np.nonzero(np.ones_like(dense, dtype=bool))
        return cls.from_entries(m, n, zip(ii, jj, dense[ii, jj]))

    @classmethod
    def _from_coo(cls, n_rows, n_cols, rows, cols, vals) -> "SparseNonnegMatrix":
        # duplicates are summed in ascending input order before zeros are dropped
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if len(rows):
            new = np.empty(len(rows), dtype=bool)
            new[0] = True
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(new)
            summed = np.array(
                [math.fsum(vals[s:e]) for s, e in zip(starts, np.append(starts[1:], len(vals)))],
                dtype=np.float64,
            )
            rows, cols, vals = rows[starts], cols[starts], summed
            keep = vals > 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        if not np.all(np.isfinite(vals)):
            raise InvalidInstance("summed duplicate entries overflowed")

        row_ptr = np.zeros(n_rows + 1, dtype=np.intp)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=row_ptr[1:])
        perm = np.lexsort((rows, cols)).astype(np.intp)
        col_ptr = np.zeros(n_cols + 1, dtype=np.intp)
        np.cumsum(np.bincount(cols, minlength=n_cols), out=col_ptr[1:])
        return cls(
            n_rows=n_rows,
            n_cols=n_cols,
            row_ptr=_frozen(row_ptr),
            row_cols=_frozen(np.ascontiguousarray(cols, dtype=np.intp)),
            row_vals=_frozen(np.ascontiguousarray(vals)),
            col_ptr=_frozen(col_ptr),
            col_rows=_frozen(np.ascontiguousarray(rows[perm])),
            col_vals=_frozen(np.ascontiguousarray(vals[perm])),
            csc_perm=_frozen(perm),
        )

    def with_values(self, row_vals: np.ndarray) -> "SparseNonnegMatrix":
        """Same sparsity pattern, new (strictly positive) CSR-ordered values."""
        row_vals = np.ascontiguousarray(row_vals, dtype=np.float64)
        if row_vals.shape != self.row_vals.shape:
            raise DimensionMismatch("value array does not match the sparsity pattern")
        return SparseNonnegMatrix(
            n_rows=self.n_rows,
            n_cols=self.n_cols,
            row_ptr=self.row_ptr,
            row_cols=self.row_cols,
            row_vals=_frozen(row_vals.copy()),
            col_ptr=self.col_ptr,
            col_rows=self.col_rows,
            col_vals=_frozen(row_vals[self.csc_perm]),
            csc_perm=self.csc_perm,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return len(self.row_vals)

    @property
    def row_of_entry(self) -> np.ndarray:
        """Row index of every CSR slot."""
        return np.repeat(np.arange(self.n_rows, dtype=np.intp), np.diff(self.row_ptr))

    def row_counts(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_counts(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    def max_entry(self) -> float:
        return float(self.row_vals.max()) if self.nnz else 0.0

    def min_entry(self) -> float:
        return float(self.row_vals.min()) if self.nnz else 0.0

    def entries(self) -> list[tuple[int, int, float]]:
        """Entries in row-major order."""
        return [
            (int(i), int(j), float(v))
            for i, j, v in zip(self.row_of_entry, self.row_cols, self.row_vals)
        ]

    def entries_colmajor(self) -> list[tuple[int, int, float]]:
        cols = np.repeat(np.arange(self.n_cols, dtype=np.intp), np.diff(self.col_ptr))
        return [(int(i), int(j), float(v)) for i, j, v in zip(self.col_rows, cols, self.col_vals)]

    def toarray(self) -> np.ndarray:
        dense = np.zeros(self.shape)
        dense[self.row_of_entry, self.row_cols] = self.row_vals
        return dense


@dataclass(frozen=True, eq=False)
class RawInstance:
    """Packing instance in original coordinates.

    All-zero rows are allowed here (the constraint ``0 <= b_i`` is vacuous);
    :func:`scale` drops them.
    """

    matrix: SparseNonnegMatrix
    b: np.ndarray
    c: np.ndarray

    @property
    def m(self) -> int:
        return self.matrix.n_rows

    @property
    def n(self) -> int:
        return self.matrix.n_cols


@dataclass(frozen=True, eq=False)
class ScaleMap:
    """Records how a scaled instance relates to the original one.

    ``kept_rows[i]`` is the original index of scaled row ``i``.
    ``truncated_entries`` holds ``(row, col, value)`` in scaled-row indexing
    with the value before clamping to ``tau``.
    """

    mu: float
    b_orig: np.ndarray
    c_orig: np.ndarray
    dropped_rows: tuple[int, ...] = ()
    kept_rows: np.ndarray | None = None
    truncated_entries: tuple[tuple[int, int, float], ...] = ()
    tau: float | None = None

    @property
    def m_orig(self) -> int:
        return len(self.b_orig)

    @property
    def n_orig(self) -> int:
        return len(self.c_orig)

    def column_repair(self) -> np.ndarray:
        """Per-column shrink factor keeping unscaled primal points feasible.

        A column with a clamped entry is shrunk by ``tau / (largest pre-clamp
        entry)``; then every original scaled entry times the factor stays at
        or below its truncated counterpart.
        """
        factor = np.ones(self.n_orig)
        for _, j, v in self.truncated_entries:
            factor[j] = min(factor[j], self.tau / v)
        return factor

    @classmethod
    def identity(cls, m: int, n: int) -> "ScaleMap":
        return cls(mu=1.0, b_orig=np.ones(m), c_orig=np.ones(n), kept_rows=np.arange(m))


@dataclass(frozen=True, eq=False)
class ScaledInstance:
    """Instance with ``b = c = 1`` and smallest nonzero entry 1."""

    matrix: SparseNonnegMatrix
    scale_map: ScaleMap
    a_inf: float

    @property
    def m(self) -> int:
        return self.matrix.n_rows

    @property
    def n(self) -> int:
        return self.matrix.n_cols

    @classmethod
    def from_dense(cls, dense) -> "ScaledInstance":
        """Wrap a matrix that is already in scaled form (identity scale map)."""
        mat = SparseNonnegMatrix.from_dense(dense)
        if np.any(mat.col_counts() == 0):
            raise EmptyColumn("matrix has an all-zero column")
        if np.any(mat.row_counts() == 0):
            raise InvalidInstance("scaled instances cannot contain all-zero rows")
        return cls(mat, ScaleMap.identity(mat.n_rows, mat.n_cols), mat.max_entry())


def _positive_vector(v, size: int, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.shape != (size,):
        raise DimensionMismatch(f"{name} has length {arr.size}, expected {size}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonPositiveWeight(f"every entry of {name} must be positive and finite")
    arr = arr.copy()
    return _frozen(arr)


def build_raw(entries, b, c, shape: tuple[int, int] | None = None) -> RawInstance:
    """Validate ``(i, j, v)`` triples and weight vectors into a :class:`RawInstance`.

    The shape defaults to ``(len(b), len(c))``.

    Raises
    ------
    NonPositiveWeight
        Some ``b_i <= 0`` or ``c_j <= 0``.
    EmptyColumn
        A column has no nonzero entry, making the packing objective unbounded.
    NegativeEntry, IndexOutOfBounds
        Bad matrix entries.
    """
    b_arr = np.asarray(b, dtype=np.float64).reshape(-1)
    c_arr = np.asarray(c, dtype=np.float64).reshape(-1)
    m, n = shape if shape is not None else (b_arr.size, c_arr.size)
    b_arr = _positive_vector(b_arr, m, "b")
    c_arr = _positive_vector(c_arr, n, "c")
    matrix = SparseNonnegMatrix.from_entries(m, n, entries)
    empty = np.flatnonzero(matrix.col_counts() == 0)
    if empty.size:
        raise EmptyColumn(
            f"column {int(empty[0])} has no nonzero entry; the packing objective is unbounded"
        )
    return RawInstance(matrix, b_arr, c_arr)


def scale(raw: RawInstance) -> ScaledInstance:
    """Normalise to ``b = c = 1`` and minimum nonzero entry 1.

    ``A_hat_ij = A_ij / (b_i c_j mu)`` with ``mu = min A_ij / (b_i c_j)`` over
    the nonzeros. All-zero rows are dropped and recorded in the map.
    """
    mat = raw.matrix
    counts = mat.row_counts()
    kept = np.flatnonzero(counts > 0)
    dropped = tuple(int(i) for i in np.flatnonzero(counts == 0))

    rows = mat.row_of_entry
    ratio = mat.row_vals / (raw.b[rows] * raw.c[mat.row_cols])
    mu = float(ratio.min())
    scaled_vals = ratio / mu

    if dropped:
        new_index = np.full(mat.n_rows, -1, dtype=np.intp)
        new_index[kept] = np.arange(len(kept))
        scaled = SparseNonnegMatrix._from_coo(
            len(kept), mat.n_cols, new_index[rows], mat.row_cols.copy(), scaled_vals
        )
    else:
        scaled = mat.with_values(scaled_vals)

    smap = ScaleMap(
        mu=mu,
        b_orig=raw.b,
        c_orig=raw.c,
        dropped_rows=dropped,
        kept_rows=_frozen(kept.astype(np.intp)),
    )
    return ScaledInstance(scaled, smap, scaled.max_entry())


def check_accuracy(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps <= 0.25):
        raise BadAccuracy(f"eps must be in (0, 0.25], got {eps}")
    return eps


def truncate(scaled: ScaledInstance, eps: float) -> ScaledInstance:
    """Clamp entries above ``tau = 2n / eps``; a no-op when none exceed it."""
    eps = check_accuracy(eps)
    mat = scaled.matrix
    tau = 2.0 * mat.n_cols / eps
    over = mat.row_vals > tau
    if not over.any():
        return scaled
    rows = mat.row_of_entry
    clamped = tuple(
        (int(rows[k]), int(mat.row_cols[k]), float(mat.row_vals[k])) for k in np.flatnonzero(over)
    )
    new = mat.with_values(np.minimum(mat.row_vals, tau))
    old = scaled.scale_map
    smap = ScaleMap(
        mu=old.mu,
        b_orig=old.b_orig,
        c_orig=old.c_orig,
        dropped_rows=old.dropped_rows,
        kept_rows=old.kept_rows,
        truncated_entries=old.truncated_entries + clamped,
        tau=tau if old.tau is None else min(tau, old.tau),
    )
    return ScaledInstance(new, smap, new.max_entry())


def prepare(raw: RawInstance, eps: float) -> ScaledInstance:
    """``truncate(scale(raw), eps)``."""
    return truncate(scale(raw), eps)


def unscale_primal(x_scaled, smap: ScaleMap) -> np.ndarray:
    """Map a scaled packing point back: ``x_j = x~_j / (mu c_j)``.

    Columns that had entries clamped by :func:`truncate` are additionally
    shrunk by :meth:`ScaleMap.column_repair` so that feasibility for the
    truncated matrix carries over to the original one.
    """
    x = np.asarray(x_scaled, dtype=np.float64)
    if x.shape != (smap.n_orig,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({smap.n_orig},)")
    out = x / (smap.mu * smap.c_orig)
    if smap.truncated_entries:
        out = out * smap.column_repair()
    return out


def unscale_dual(y_scaled, smap: ScaleMap) -> np.ndarray:
    """Map a scaled covering point back: ``y_i = y~_i / (mu b_i)``; dropped rows get 0."""
    y = np.asarray(y_scaled, dtype=np.float64)
    kept = smap.kept_rows if smap.kept_rows is not None else np.arange(smap.m_orig)
    if y.shape != (len(kept),):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({len(kept)},)")
    out = np.zeros(smap.m_orig)
    out[kept] = y / (smap.mu * smap.b_orig[kept])
    return out


def _segment_sum(values: np.ndarray, ptr: np.ndarray, compensated: bool = False) -> np.ndarray:
    """Sum ``values[ptr[k]:ptr[k+1]]`` for each k, strictly in ascending slot order.

    Vectorised across segments; sequential within one. ``compensated`` uses
    Neumaier's correction.
    """
    starts = ptr[:-1]
    lengths = np.diff(ptr)
    total = np.zeros(len(lengths))
    comp = np.zeros(len(lengths)) if compensated else None
    longest = int(lengths.max()) if len(lengths) else 0
    for k in range(longest):
        live = np.flatnonzero(lengths > k)
        term = values[starts[live] + k]
        if compensated:
            acc = total[live]
            new = acc + term
            comp[live] += np.where(
                np.abs(acc) >= np.abs(term), (acc - new) + term, (term - new) + acc
            )
            total[live] = new
        else:
            total[live] += term
    return total + comp if compensated else total


def matvec(A: SparseNonnegMatrix, x) -> np.ndarray:
    """``A @ x``, summing each row in ascending column order."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n_cols,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({A.n_cols},)")
    return _segment_sum(A.row_vals * x[A.row_cols], A.row_ptr)


def tmatvec(A: SparseNonnegMatrix, y, compensated: bool = False) -> np.ndarray:
    """``A.T @ y``, summing each column in ascending row order."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (A.n_rows,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({A.n_rows},)")
    return _segment_sum(A.col_vals * y[A.col_rows], A.col_ptr, compensated)
