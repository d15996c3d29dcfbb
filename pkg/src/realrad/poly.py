"""Sparse multivariate polynomials over exact rationals or floats, the graded
reverse lexicographic (grevlex) order, monomial classes, and the text format
for input systems.

Variables carry internal indices 1..n.  Internal index 1 is the
grevlex-smallest variable.  The class of a nonzero exponent is the smallest
internal index with a nonzero entry; the constant exponent gets class n by
convention.  User-facing variable names are mapped onto internal indices by
VariableOrder: the first name in an order chain becomes internal index 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Exponent = tuple  # tuple[int, ...], length n

LESS, EQUAL, GREATER = -1, 0, 1


def degree(e: Exponent) -> int:
    """Total degree of an exponent."""
    return sum(e)


def expo_add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def expo_sub(a: Exponent, b: Exponent) -> Exponent:
    """Componentwise difference; entries may be negative."""
    return tuple(x - y for x, y in zip(a, b))


def grevlex_compare(a: Exponent, b: Exponent) -> int:
    """Return LESS, EQUAL or GREATER as a precedes, equals or follows b.

    Grades by total degree; ties break on the first nonzero entry of a - b,
    positive meaning a is the smaller monomial.
    """
    if len(a) != len(b):
        raise ValueError(f"exponent dimensions differ: {len(a)} vs {len(b)}")
    da, db = sum(a), sum(b)
    if da != db:
        return LESS if da < db else GREATER
    for x, y in zip(a, b):
        if x != y:
            return LESS if x > y else GREATER
    return EQUAL


def grevlex_key(e: Exponent):
    """Sort key listing exponents grevlex-ascending."""
    return (sum(e), tuple(-c for c in e))


def class_of(e: Exponent) -> int:
    """Smallest internal index (1-based) with a nonzero entry; n for the constant."""
    for i, c in enumerate(e):
        if c:
            return i + 1
    return len(e)


class Polynomial:
    """Immutable sparse polynomial.

    Coefficients are all Fraction (exact=True) or all float (exact=False);
    zero coefficients are never stored.
    """

    __slots__ = ("nvars", "coeffs", "exact")

    def __init__(self, nvars: int, coeffs: Mapping | Iterable = (), exact: bool = True):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        conv = Fraction if exact else float
        acc: dict = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for {nvars} variables")
            acc[e] = acc.get(e, conv(0)) + conv(c)
        self.nvars = nvars
        self.coeffs = {e: c for e, c in acc.items() if c != 0}
        self.exact = exact

    @staticmethod
    def zero(nvars: int, exact: bool = True) -> "Polynomial":
        return Polynomial(nvars, (), exact)

    @staticmethod
    def constant(nvars: int, c, exact: bool = True) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: c}, exact)

    @staticmethod
    def variable(nvars: int, i: int, exact: bool = True) -> "Polynomial":
        """The variable with internal index i (1-based)."""
        e = tuple(1 if k == i - 1 else 0 for k in range(nvars))
        return Polynomial(nvars, {e: 1}, exact)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.coeffs), default=-1)

    def leading_exponent(self) -> Exponent:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading exponent")
        return max(self.coeffs, key=grevlex_key)

    def leading_coeff(self):
        return self.coeffs[self.leading_exponent()]

    def terms_descending(self) -> list:
        """(exponent, coefficient) pairs, grevlex-largest first."""
        return sorted(self.coeffs.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def monic(self) -> "Polynomial":
        lc = self.leading_coeff()
        return self.scale(Fraction(1, 1) / lc if self.exact else 1.0 / lc)

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.nvars, {e: v * c for e, v in self.coeffs.items()}, self.exact)

    def shift(self, e: Exponent) -> "Polynomial":
        """Multiply by the monomial x^e."""
        return Polynomial(
            self.nvars, {expo_add(a, e): v for a, v in self.coeffs.items()}, self.exact
        )

    def _binop(self, other: "Polynomial", sign: int) -> "Polynomial":
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        exact = self.exact and other.exact
        items = list(self.coeffs.items()) + [(e, sign * c) for e, c in other.coeffs.items()]
        return Polynomial(self.nvars, items, exact)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return self._binop(other, 1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self._binop(other, -1)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        exact = self.exact and other.exact
        acc: list = []
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                acc.append((expo_add(ea, eb), ca * cb))
        return Polynomial(self.nvars, acc, exact)

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1, self.exact)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def evaluate(self, point: Sequence) -> float:
        """Evaluate at a point given in internal variable order."""
        total = Fraction(0) if self.exact else 0.0
        for e, c in self.coeffs.items():
            v = c
            for x, p in zip(point, e):
                if p:
                    v = v * x**p
            total += v
        return total

    def to_float(self) -> "Polynomial":
        if not self.exact:
            return self
        return Polynomial(self.nvars, {e: float(c) for e, c in self.coeffs.items()}, exact=False)

    def to_exact(self) -> "Polynomial":
        if self.exact:
            return self
        return Polynomial(self.nvars, {e: Fraction(c) for e, c in self.coeffs.items()}, exact=True)

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)})"


def class_of_poly(p: Polynomial) -> int:
    """Class of the leading exponent."""
    if p.is_zero:
        raise ValueError("zero polynomial has no class")
    return class_of(p.leading_exponent())


def substitute(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Replace internal variable i by images[i-1]; images share one variable set."""
    if len(images) != p.nvars:
        raise ValueError("need one image per variable")
    nv = images[0].nvars
    out = Polynomial.zero(nv, p.exact and all(g.exact for g in images))
    cache: dict = {}
    for e, c in p.coeffs.items():
        term = Polynomial.constant(nv, c, out.exact)
        for i, ei in enumerate(e):
            if ei:
                if (i, ei) not in cache:
                    cache[(i, ei)] = images[i] ** ei
                term = term * cache[(i, ei)]
        out = out + term
    return out


@dataclass(frozen=True)
class VariableOrder:
    """Maps user variable names to internal indices 1..n.

    names[k] is the display name of internal index k+1, so names[0] is the
    grevlex-smallest variable.  declared keeps the original declaration order
    for printing.
    """

    names: tuple
    declared: tuple = ()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if not self.declared:
            object.__setattr__(self, "declared", self.names)
        if set(self.declared) != set(self.names):
            raise ValueError("declared names differ from ordered names")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        """Internal index (1-based) of a variable name."""
        try:
            return self.names.index(name) + 1
        except ValueError:
            raise KeyError(f"unknown variable '{name}'") from None

    @staticmethod
    def from_chain(chain: Sequence[str], declared: Sequence[str] = ()) -> "VariableOrder":
        return VariableOrder(tuple(chain), tuple(declared) or tuple(chain))


def _coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def format_poly(p: Polynomial, order: VariableOrder | None = None) -> str:
    """Canonical text form: terms grevlex-descending, explicit * and ^."""
    if p.is_zero:
        return "0"
    names = order.names if order else tuple(f"x{i+1}" for i in range(p.nvars))
    show = order.declared if order else names
    pieces = []
    for e, c in p.terms_descending():
        factors = []
        for name in show:
            k = names.index(name)
            if e[k] == 1:
                factors.append(name)
            elif e[k] > 1:
                factors.append(f"{name}^{e[k]}")
        neg = c < 0
        mag = -c if neg else c
        body = "*".join(factors)
        if not factors:
            body = _coeff_str(mag)
        elif mag != 1:
            body = f"{_coeff_str(mag)}*{body}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(pieces)


class ParseError(ValueError):
    """Syntax or semantic error in the input text, with position."""

    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str, line: int, col0: int) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", line, col0 + pos)
            break
        col = col0 + m.start(m.lastgroup)
        if m.lastgroup == "num":
            tokens.append(("num", Fraction(m.group("num")), col))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), col))
        else:
            tokens.append(("op", m.group("op"), col))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text)))
    return tokens


class _ExprParser:
    """Recursive-descent parser for +, -, *, /, ^ and parentheses."""

    def __init__(self, tokens, order: VariableOrder, line: int):
        self.tokens = tokens
        self.i = 0
        self.order = order
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, _ = self.peek()
        if kind != "end":
            self.fail(f"unexpected {val!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                tok = self.take()
                q = self.unary()
                if val == "*":
                    p = p * q
                else:
                    if q.degree() > 0 or q.is_zero:
                        self.fail("division only by a nonzero constant", tok)
                    p = p.scale(Fraction(1) / q.leading_coeff())
            else:
                return p

    def unary(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        p = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            tok = self.take()
            ekind, ev, _ = self.take()
            if ekind != "num" or ev.denominator != 1:
                self.fail("exponent must be a non-negative integer", tok)
            p = p ** int(ev)
        return p

    def atom(self) -> Polynomial:
        kind, val, col = self.take()
        n = self.order.n
        if kind == "num":
            return Polynomial.constant(n, val)
        if kind == "name":
            try:
                return Polynomial.variable(n, self.order.index(val))
            except KeyError:
                raise ParseError(f"unknown variable '{val}'", self.line, col) from None
        if kind == "op" and val == "(":
            p = self.expr()
            kind, val, _ = self.take()
            if not (kind == "op" and val == ")"):
                self.fail("expected ')'")
            return p
        self.fail("expected a number, variable or '('", (kind, val, col))


def parse_polynomial(text: str, order: VariableOrder, line: int = 1, col0: int = 1) -> Polynomial:
    """Parse one infix expression into an exact Polynomial."""
    return _ExprParser(_tokenize(text, line, col0), order, line).parse()


def parse_system(text: str):
    """Parse an input system.

    Returns (variable names as declared, VariableOrder, generators,
    inequalities).  Polynomials have exact rational coefficients.  The order
    line lists variables grevlex-smallest first; without one, declaration
    order is used.
    """
    names: list = []
    chain: list | None = None
    pending: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        key, sep, rest = body.partition(":")
        if not sep:
            raise ParseError("expected 'vars:', 'order:', 'gen:' or 'ineq:'", lineno, 1)
        key = key.strip()
        col0 = len(key) + len(sep) + (len(body) - len(body.lstrip())) + 1
        if key == "vars":
            if names:
                raise ParseError("duplicate vars: line", lineno, 1)
            names = rest.replace(",", " ").split()
            if not names:
                raise ParseError("vars: needs at least one name", lineno, col0)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                    raise ParseError(f"invalid variable name '{nm}'", lineno, col0)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", lineno, col0)
        elif key == "order":
            if chain is not None:
                raise ParseError("duplicate order: line", lineno, 1)
            chain = [tok.strip() for tok in rest.split(">")]
            if not all(chain):
                raise ParseError("malformed order chain", lineno, col0)
        elif key in ("gen", "ineq"):
            pending.append((key, lineno, col0, rest))
        else:
            raise ParseError(f"unknown directive '{key}:'", lineno, 1)
    if not names:
        raise ParseError("missing vars: line", 1, 1)
    if chain is None:
        chain = list(names)
    if set(chain) != set(names) or len(chain) != len(names):
        raise ParseError("order: must list each declared variable exactly once", 1, 1)
    order = VariableOrder(tuple(chain), tuple(names))
    gens, ineqs = [], []
    for key, lineno, col0, rest in pending:
        p = parse_polynomial(rest, order, lineno, col0)
        (gens if key == "gen" else ineqs).append(p)
    return tuple(names), order, gens, ineqs
