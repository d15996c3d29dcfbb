"""Monomial indexing for truncated polynomial spaces and assembly of moment
and localizing matrices from a moment vector.

A MonomialIndex lists all exponents of degree <= t grevlex-ascending, so the
matrix of order s - l is always the leading principal submatrix of the matrix
of order s.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .poly import Exponent, Polynomial, degree, expo_add, grevlex_key


@dataclass(frozen=True)
class MonomialIndex:
    """All exponents of degree <= t in n variables, grevlex-ascending."""

    n: int
    t: int
    exponents: tuple
    position: dict

    def __len__(self) -> int:
        return len(self.exponents)


def _exponents_up_to(n: int, t: int):
    if n == 0:
        yield ()
        return
    for rest in _exponents_up_to(n - 1, t):
        for k in range(t - sum(rest) + 1):
            yield (k,) + rest


@lru_cache(maxsize=None)
def build_index(n: int, t: int) -> MonomialIndex:
    """Monomial index of order t; size C(n+t, n), position 0 is the constant."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    exps = sorted(_exponents_up_to(n, t), key=grevlex_key)
    return MonomialIndex(n, t, tuple(exps), {e: i for i, e in enumerate(exps)})


@dataclass(frozen=True)
class MomentVector:
    """Truncated moment sequence indexed by all exponents of degree <= order."""

    n: int
    order: int
    values: np.ndarray
    index: MonomialIndex

    def __post_init__(self):
        if self.index.n != self.n or self.index.t != self.order:
            raise ValueError("index does not match the stated order")
        if len(self.values) != len(self.index):
            raise ValueError("value count does not match the index size")

    @property
    def normalized(self) -> bool:
        return abs(self.values[0] - 1.0) <= 1e-12

    def value(self, e: Exponent) -> float:
        return float(self.values[self.index.position[e]])


def moment_vector(n: int, order: int, values) -> MomentVector:
    return MomentVector(n, order, np.asarray(values, dtype=float), build_index(n, order))


def vect(h: Polynomial, index: MonomialIndex) -> np.ndarray:
    """Dense coefficient vector of h over the index monomials."""
    if h.degree() > index.t:
        raise ValueError(f"degree {h.degree()} exceeds index order {index.t}")
    v = np.zeros(len(index))
    for e, c in h.coeffs.items():
        v[index.position[e]] = float(c)
    return v


def assemble_moment(y: MomentVector, s: int) -> np.ndarray:
    """Moment matrix of order s: entry (a, b) = y[a + b]."""
    if 2 * s > y.order:
        raise ValueError(f"moment matrix of order {s} needs moments up to {2 * s}")
    idx = build_index(y.n, s)
    m = len(idx)
    M = np.empty((m, m))
    pos = y.index.position
    vals = y.values
    for i, a in enumerate(idx.exponents):
        for j in range(i, m):
            M[i, j] = M[j, i] = vals[pos[expo_add(a, idx.exponents[j])]]
    return M


def assemble_localizer(f: Polynomial, y: MomentVector, s: int) -> np.ndarray:
    """Localizing matrix of order s: entry (a, b) = sum_g f_g * y[a + b + g]."""
    if 2 * s + f.degree() > y.order:
        raise ValueError("localizer order exceeds the available moments")
    idx = build_index(y.n, s)
    m = len(idx)
    M = np.zeros((m, m))
    pos = y.index.position
    vals = y.values
    fterms = [(e, float(c)) for e, c in f.coeffs.items()]
    for i, a in enumerate(idx.exponents):
        for j in range(i, m):
            ab = expo_add(a, idx.exponents[j])
            v = 0.0
            for g, c in fterms:
                v += c * vals[pos[expo_add(ab, g)]]
            M[i, j] = M[j, i] = v
    return M


@dataclass(frozen=True)
class BlockStructure:
    """Symbolic localizing block: S[i, j] = sum over stored (i, j, p, c) of
    c * y[p], upper triangle only; assemble() mirrors it."""

    label: str
    size: int
    order: int
    ii: np.ndarray
    jj: np.ndarray
    pp: np.ndarray
    cc: np.ndarray
    coeff_scale: float

    def assemble(self, y: np.ndarray) -> np.ndarray:
        S = np.zeros((self.size, self.size))
        np.add.at(S, (self.ii, self.jj), self.cc * y[self.pp])
        return np.triu(S) + np.triu(S, 1).T

    def kernel_rows(self, v: np.ndarray, ysize: int) -> np.ndarray:
        """Linear forms over y expressing S(y) @ v = 0, one row per block row."""
        mask = self.ii != self.jj
        full_i = np.concatenate([self.ii, self.jj[mask]])
        full_j = np.concatenate([self.jj, self.ii[mask]])
        full_p = np.concatenate([self.pp, self.pp[mask]])
        full_c = np.concatenate([self.cc, self.cc[mask]])
        R = np.zeros((self.size, ysize))
        np.add.at(R, (full_i, full_p), full_c * v[full_j])
        return R


def symbolic_localizer(f: Polynomial, s: int, index_y: MonomialIndex, label: str) -> BlockStructure:
    """Symbolic entries of the order-s localizing block of f over the y index."""
    if 2 * s + f.degree() > index_y.t:
        raise ValueError("localizer order exceeds the available moments")
    idx = build_index(index_y.n, s)
    m = len(idx)
    pos = index_y.position
    ii, jj, pp, cc = [], [], [], []
    fterms = [(e, float(c)) for e, c in f.coeffs.items()]
    for i, a in enumerate(idx.exponents):
        for j in range(i, m):
            ab = expo_add(a, idx.exponents[j])
            for g, c in fterms:
                ii.append(i)
                jj.append(j)
                pp.append(pos[expo_add(ab, g)])
                cc.append(c)
    scale = max(1.0, sum(abs(float(c)) for c in f.coeffs.values()))
    return BlockStructure(
        label,
        m,
        s,
        np.array(ii, dtype=np.intp),
        np.array(jj, dtype=np.intp),
        np.array(pp, dtype=np.intp),
        np.array(cc, dtype=float),
        scale,
    )
