"""Reduced bases of truncated moment-matrix kernels.

A reduced basis is a linear basis of the numerical nullspace whose elements
have pairwise-distinct grevlex leading monomials and unit leading
coefficients, obtained by row reduction with columns scanned
grevlex-descending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import rank_and_nullspace, reduce_rows
from .moment import MonomialIndex, MomentVector, assemble_moment, build_index, vect
from .poly import Exponent, Polynomial

@dataclass(frozen=True)
class ReducedBasis:
    """Kernel polynomials with distinct leading monomials, grevlex-descending."""

    s: int
    elements: list
    leads: list

    def __len__(self) -> int:
        return len(self.elements)

    def degrees(self) -> list:
        return [sum(e) for e in self.leads]


def reduced_kernel_basis(M: np.ndarray, index: MonomialIndex, tol: float) -> ReducedBasis:
    """Reduced basis of the numerical nullspace of a moment matrix of order
    index.t; element count equals the corank at tol."""
    if M.shape[0] != len(index):
        raise ValueError("matrix size does not match the monomial index")
    dec, null = rank_and_nullspace(M, tol)
    if dec.corank == 0:
        return ReducedBasis(index.t, [], [])
    rows = null.T
    order = list(range(len(index)))[::-1]
    R, pivots = reduce_rows(rows, order, drop_tol=1e-2 * tol)
    if len(pivots) != dec.corank:
        raise ArithmeticError(
            f"row reduction produced {len(pivots)} pivots for corank {dec.corank}"
        )
    elements, leads = [], []
    for row, piv in zip(R, pivots):
        coeffs = {index.exponents[j]: row[j] for j in np.flatnonzero(row)}
        elements.append(Polynomial(index.n, coeffs, exact=False))
        leads.append(index.exponents[piv])
    return ReducedBasis(index.t, elements, leads)


def truncate_basis(b: ReducedBasis, s2: int) -> ReducedBasis:
    """Elements of degree <= s2; by the kernel truncation identity this is a
    reduced basis of the order-s2 kernel."""
    if s2 > b.s:
        raise ValueError("cannot truncate upward")
    kept = [(e, l) for e, l in zip(b.elements, b.leads) if e.degree() <= s2]
    return ReducedBasis(s2, [e for e, _ in kept], [l for _, l in kept])


def corank_profile(b: ReducedBasis) -> dict:
    """Element counts by exact degree."""
    prof: dict = {}
    for d in b.degrees():
        prof[d] = prof.get(d, 0) + 1
    return dict(sorted(prof.items()))


def check_truncation(y: MomentVector, b: ReducedBasis, s2: int, tol: float) -> bool:
    """Truncation identity: the degree-cut of b equals the reduced basis
    computed directly from the order-s2 moment matrix, with identical leading
    monomials and coefficients within 10*tol."""
    cut = truncate_basis(b, s2)
    direct = reduced_kernel_basis(assemble_moment(y, s2), build_index(y.n, s2), tol)
    if cut.leads != direct.leads:
        return False
    idx = build_index(y.n, s2)
    for e1, e2 in zip(cut.elements, direct.elements):
        if np.max(np.abs(vect(e1, idx) - vect(e2, idx))) > 10.0 * tol:
            return False
    return True


def kernel_residual(M: np.ndarray, index: MonomialIndex, p: Polynomial) -> float:
    """Relative residual of p against the kernel of a moment matrix."""
    v = vect(p, index)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return 0.0
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    return float(np.linalg.norm(M @ v)) / (scale * nv)
