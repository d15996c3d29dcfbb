"""Dense symmetric eigendecomposition, numerical rank and nullspace at a
relative tolerance, and Gauss-Jordan row reduction with a caller-supplied
column order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RankDecision:
    """Numerical rank of a matrix: singular values (descending), the relative
    tolerance used, and the resulting rank/corank split."""

    singular_values: np.ndarray
    tol: float
    rank: int
    corank: int


def _as_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("non-finite matrix entries")
    return (M + M.T) / 2.0


def sym_eigen(M: np.ndarray):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    return np.linalg.eigh(_as_symmetric(M))


def rank_and_nullspace(M: np.ndarray, tol: float):
    """Numerical rank at threshold tol*max(1, sigma_1) and an orthonormal
    basis of the numerical nullspace (columns)."""
    if not 0.0 < tol < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    S = _as_symmetric(M)
    _, sv, Vt = np.linalg.svd(S)
    cutoff = tol * max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.count_nonzero(sv > cutoff))
    null = Vt[rank:].T.copy()
    return RankDecision(sv, tol, rank, S.shape[0] - rank), null


def nullspace_rows(A: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (columns) of the nullspace of a rectangular matrix."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.eye(A.shape[1] if A.ndim == 2 else 0)
    _, sv, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.count_nonzero(sv > rtol * sv[0])) if sv.size else 0
    return Vt[rank:].T.copy()


def reduce_rows(rows: np.ndarray, column_order: Sequence[int],
                drop_tol: float = 0.0, pivot_tol: float | None = None):
    """Gauss-Jordan elimination scanning columns in the given order.

    Each pivot becomes 1 and is the only nonzero in its column.  Rows that
    vanish are dropped.  After elimination, entries below drop_tol times the
    row's largest magnitude are zeroed.  Columns whose largest candidate
    entry falls below pivot_tol times the matrix scale are skipped
    (pivot_tol defaults to drop_tol).  Returns (reduced rows, pivot column
    per row) with rows listed in pivot discovery order.
    """
    A = np.array(rows, dtype=float)
    if A.ndim != 2:
        A = A.reshape(1, -1)
    nrows = A.shape[0]
    order = list(column_order)
    if sorted(order) != list(range(A.shape[1])):
        raise ValueError("column_order must be a permutation of the columns")
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0.0:
        return np.zeros((0, A.shape[1])), []
    if pivot_tol is None:
        pivot_tol = drop_tol
    cut = max(pivot_tol, 1e-13) * scale
    pivots: list = []
    r = 0
    for col in order:
        if r == nrows:
            break
        sub = np.abs(A[r:, col])
        imax = int(np.argmax(sub))
        if sub[imax] <= cut:
            continue
        A[[r, r + imax]] = A[[r + imax, r]]
        A[r] /= A[r, col]
        others = np.arange(nrows) != r
        A[others] -= np.outer(A[others, col], A[r])
        pivots.append(col)
        r += 1
    A = A[:r]
    for i in range(r):
        row_max = np.abs(A[i]).max()
        if drop_tol > 0.0 and row_max > 0.0:
            small = np.abs(A[i]) < drop_tol * row_max
            small[pivots[i]] = False
            A[i][small] = 0.0
        A[i] /= A[i, pivots[i]]
        A[i, pivots[i]] = 1.0
    return A, pivots
