"""Pommaret-division combinatorics: multiplicative variables, involutive
divisibility, the class-count certificate, weak-to-strong basis reduction,
involutive and ordinary normal forms, and an exact Groebner check.

The Pommaret rule assigns a class-k leading exponent the multiplicative
variables {1..k}; an exponent d involutively divides m when m - d is
non-negative and supported on the multiplicative variables of d.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .kernel import ReducedBasis
from .poly import (
    Exponent,
    Polynomial,
    class_of,
    degree,
    expo_sub,
    grevlex_key,
)

log = logging.getLogger("realrad.pommaret")

WEAK = "WEAK"
STRONG = "STRONG"


def multiplicative_variables(e: Exponent) -> frozenset:
    """Internal indices 1..cls(e); all variables for the constant exponent."""
    return frozenset(range(1, class_of(e) + 1))


def involutively_divides(d: Exponent, m: Exponent) -> bool:
    """True when m - d is non-negative and vanishes beyond cls(d)."""
    if len(d) != len(m):
        raise ValueError("exponent dimensions differ")
    diff = expo_sub(m, d)
    if any(x < 0 for x in diff):
        return False
    cls = class_of(d)
    return all(x == 0 for x in diff[cls:])


@dataclass(frozen=True)
class ClassProfile:
    """alpha[j-1] counts the degree-slice basis elements of class j."""

    alpha: tuple

    @property
    def weighted_sum(self) -> int:
        return sum((j + 1) * a for j, a in enumerate(self.alpha))

    @property
    def total(self) -> int:
        return sum(self.alpha)


def class_profile(b: ReducedBasis, deg: int) -> ClassProfile:
    """Class counts over the elements of exact degree deg."""
    if not b.elements:
        return ClassProfile(())
    n = b.elements[0].nvars
    alpha = [0] * n
    for lead in b.leads:
        if sum(lead) == deg:
            alpha[class_of(lead) - 1] += 1
    return ClassProfile(tuple(alpha))


def certificate_check(profile: ClassProfile, crk_tm1: int, crk_tm2: int) -> bool:
    """True when the weighted class sum equals the corank difference."""
    diff = crk_tm1 - crk_tm2
    if diff < 0:
        log.warning(
            "corank difference %d is negative: numerical rank decisions are inconsistent", diff
        )
        return False
    return profile.weighted_sum == diff


@dataclass(frozen=True)
class PommaretBasis:
    """Basis elements with their division strength flag."""

    elements: list
    strength: str

    def __len__(self) -> int:
        return len(self.elements)

    def leads(self) -> list:
        return [p.leading_exponent() for p in self.elements]

    def multiplicative_sets(self) -> list:
        return [multiplicative_variables(e) for e in self.leads()]


def _descending(polys) -> list:
    return sorted(polys, key=lambda p: grevlex_key(p.leading_exponent()), reverse=True)


def strong_from_weak(weak: list, drop_tol: float = 0.0) -> PommaretBasis:
    """Reduce a weak basis to a strong one: keep only elements whose leading
    exponent has no involutive divisor among the others, then autoreduce the
    tails so no remaining term lies in another element's involutive cone."""
    items = _descending([p.monic() for p in weak if not p.is_zero])
    leads = [p.leading_exponent() for p in items]
    if len(set(leads)) != len(leads):
        raise ValueError("weak basis has repeated leading exponents")
    kept = [
        p
        for p, e in zip(items, leads)
        if not any(g != e and involutively_divides(g, e) for g in leads)
    ]
    for _ in range(4):
        changed = False
        for i, p in enumerate(kept):
            lead = p.leading_exponent()
            head = Polynomial(p.nvars, {lead: p.coeffs[lead]}, p.exact)
            tail = p - head
            reduced = involutive_normal_form(tail, kept, drop_tol=drop_tol, _unchecked=True)
            candidate = head + reduced
            if candidate != p:
                kept[i] = candidate.monic()
                changed = True
        if not changed:
            break
    else:
        raise ArithmeticError("involutive autoreduction did not stabilize")
    basis = PommaretBasis(kept, STRONG)
    for i, a in enumerate(basis.leads()):
        for j, b in enumerate(basis.leads()):
            if i != j and involutively_divides(a, b):
                raise ArithmeticError("involutive cones are not disjoint after reduction")
    return basis


def involutive_normal_form(
    f: Polynomial, H, drop_tol: float = 0.0, _unchecked: bool = False
) -> Polynomial:
    """Involutive remainder of f: repeatedly cancel the grevlex-largest term
    that some basis leading exponent involutively divides, using only
    multiplicative-variable shifts of that element."""
    if isinstance(H, PommaretBasis):
        if H.strength != STRONG and not _unchecked:
            raise ValueError("involutive normal form needs a strong basis")
        elements = H.elements
    else:
        elements = list(H)
    table = [(h.leading_exponent(), h.leading_coeff(), h) for h in elements if not h.is_zero]
    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            raise ArithmeticError("involutive reduction did not terminate")
        hit = None
        for e, c in f.terms_descending():
            for lead, lc, h in table:
                if involutively_divides(lead, e):
                    hit = (e, c, lead, lc, h)
                    break
            if hit:
                break
        if hit is None:
            return f
        e, c, lead, lc, h = hit
        shift = expo_sub(e, lead)
        f = f - h.shift(shift).scale(c / lc)
        if drop_tol > 0.0 and not f.is_zero:
            top = max(abs(v) for v in f.coeffs.values())
            f = Polynomial(
                f.nvars,
                {m: v for m, v in f.coeffs.items() if abs(v) >= drop_tol * top},
                f.exact,
            )


def ordinary_normal_form(f: Polynomial, G, drop_tol: float = 0.0) -> Polynomial:
    """Remainder of f under ordinary polynomial division by the set G."""
    elements = G.elements if isinstance(G, PommaretBasis) else list(G)
    table = [(h.leading_exponent(), h.leading_coeff(), h) for h in elements if not h.is_zero]
    guard = 0
    while True:
        guard += 1
        if guard > 200000:
            raise ArithmeticError("ordinary reduction did not terminate")
        hit = None
        for e, c in f.terms_descending():
            for lead, lc, h in table:
                diff = expo_sub(e, lead)
                if all(x >= 0 for x in diff):
                    hit = (diff, c, lc, h)
                    break
            if hit:
                break
        if hit is None:
            return f
        diff, c, lc, h = hit
        f = f - h.shift(diff).scale(c / lc)
        if drop_tol > 0.0 and not f.is_zero:
            top = max(abs(v) for v in f.coeffs.values())
            f = Polynomial(
                f.nvars,
                {m: v for m, v in f.coeffs.items() if abs(v) >= drop_tol * top},
                f.exact,
            )


def groebner_verify(H) -> bool:
    """Buchberger check with the coprime-leading-term skip; exact input only."""
    elements = H.elements if isinstance(H, PommaretBasis) else list(H)
    if any(not p.exact for p in elements):
        raise TypeError("groebner_verify needs exact rational coefficients")
    elements = [p for p in elements if not p.is_zero]
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            ei = elements[i].leading_exponent()
            ej = elements[j].leading_exponent()
            if all(min(a, b) == 0 for a, b in zip(ei, ej)):
                continue
            lcm = tuple(max(a, b) for a, b in zip(ei, ej))
            si = elements[i].shift(expo_sub(lcm, ei)).scale(
                Fraction(1) / elements[i].leading_coeff()
            )
            sj = elements[j].shift(expo_sub(lcm, ej)).scale(
                Fraction(1) / elements[j].leading_coeff()
            )
            if not ordinary_normal_form(si - sj, elements).is_zero:
                return False
    return True
