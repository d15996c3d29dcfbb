"""End-to-end driver: sweep relaxation orders, solve for a generic moment
sequence, read off truncated-kernel bases, test the class-count certificate,
and emit weak/strong generator bases with optional exact rationalization.

Per order t the relaxation constrains a moment vector of order 2t by the
moment PSD block, equality rows forcing every generator localizer to vanish,
one localizing PSD block per nonempty product of the inequality constraints,
and an optional ball localizer.  The certificate at t compares the weighted
class counts of the degree-(t-2) kernel slice against the corank jump from
order t-2 to t-1; on success the degree-(t-2) kernel cut generates the
candidate real-radical ideal.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .kernel import (
    check_truncation,
    kernel_residual,
    reduced_kernel_basis,
)
from .linalg import rank_and_nullspace
from .moment import assemble_moment, build_index, symbolic_localizer
from .poly import (
    Polynomial,
    VariableOrder,
    expo_add,
    grevlex_key,
    parse_system,
    substitute,
)
from .pommaret import (
    PommaretBasis,
    certificate_check,
    class_profile,
    groebner_verify,
    ordinary_normal_form,
    strong_from_weak,
)
from .sdp import (
    INFEASIBLE,
    NUMERICAL_FAILURE,
    RelaxationProblem,
    SolveOptions,
    solve_generic,
)

log = logging.getLogger("realrad.pipeline")

CERTIFIED = "CERTIFIED"
EXHAUSTED_T = "EXHAUSTED_T"

MAX_INEQUALITIES = 6
RATIONALIZE_WINDOWS = (1e-10, 1e-8, 1e-6, 1e-4, 1e-3)


@dataclass(frozen=True)
class ProblemSpec:
    """A polynomial system with its run options."""

    names: tuple
    order: VariableOrder
    generators: tuple
    inequalities: tuple = ()
    tol: float = 1e-8
    t_start: int | None = None
    t_max: int | None = None
    ball: float | None = None
    seed: int = 0
    rat_tol: float | None = None

    def __post_init__(self):
        if not self.generators:
            raise ValueError("need at least one generator")
        for p in tuple(self.generators) + tuple(self.inequalities):
            if p.is_zero:
                raise ValueError("zero polynomial in the input system")
            if not p.exact:
                raise ValueError("input polynomials must have exact coefficients")
            if p.nvars != self.order.n:
                raise ValueError("polynomial does not match the variable count")
        if not 0.0 < self.tol < 0.1:
            raise ValueError("tolerance must lie in (0, 0.1)")
        if len(self.inequalities) > MAX_INEQUALITIES:
            raise ValueError(
                f"at most {MAX_INEQUALITIES} inequalities are supported "
                f"(product blocks grow as 2^s)"
            )


def spec_from_text(text: str, **options) -> ProblemSpec:
    """Build a ProblemSpec from input-file text; options forward to fields."""
    names, order, gens, ineqs = parse_system(text)
    return ProblemSpec(names, order, tuple(gens), tuple(ineqs), **options)


@dataclass(frozen=True)
class OrderRecord:
    """What one relaxation order produced: ranks and coranks of the top three
    moment matrices, class counts of the degree-(t-2) kernel slice, and the
    certificate outcome."""

    t: int
    rank: tuple
    corank: tuple
    alpha: tuple
    weighted_sum: int
    corank_diff: int
    passed: bool


@dataclass(frozen=True)
class SolverInfo:
    """Diagnostics of the last completed solve."""

    residual_eq: float
    min_eig: float
    iterations: int
    seed: int


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the order sweep."""

    status: str
    certified_t: int | None
    records: tuple
    weak_basis: tuple
    strong_basis: tuple
    rationalized: bool
    solver: SolverInfo | None
    message: str = ""


def _half_degree(p: Polynomial) -> int:
    return (p.degree() + 1) // 2


def sweep_bounds(spec: ProblemSpec) -> tuple:
    """Default order range: start at max(2d, 2), stop at 2d + 8."""
    d = max(_half_degree(h) for h in spec.generators)
    t0 = spec.t_start if spec.t_start is not None else max(2 * d, 2)
    t1 = spec.t_max if spec.t_max is not None else 2 * d + 8
    if t0 < d:
        raise ValueError(f"start order {t0} is below the half-degree bound {d}")
    if t1 < t0:
        raise ValueError("t_max is below the start order")
    return t0, t1


def build_relaxation(spec: ProblemSpec, t: int) -> RelaxationProblem:
    """Relaxation of order t: moment block, generator equality rows, one
    localizing block per nonempty inequality subset, optional ball block."""
    n = spec.order.n
    d = max(_half_degree(h) for h in spec.generators)
    if t < d:
        raise ValueError(f"order {t} is below the half-degree bound {d}")
    index = build_index(n, 2 * t)
    one = Polynomial.constant(n, 1)
    blocks = [symbolic_localizer(one, t, index, "moment")]

    seen = set()
    rows = []
    for h in spec.generators:
        s_h = t - _half_degree(h)
        hterms = list(h.coeffs.items())
        for delta in build_index(n, 2 * s_h).exponents:
            entries = {index.position[expo_add(delta, g)]: c for g, c in hterms}
            pmin = min(entries)
            c0 = entries[pmin]
            key = tuple(sorted((p, c / c0) for p, c in entries.items()))
            if key not in seen:
                seen.add(key)
                rows.append(key)
    E = np.zeros((len(rows), len(index)))
    for i, key in enumerate(rows):
        for p, c in key:
            E[i, p] = float(c)

    for r in range(1, len(spec.inequalities) + 1):
        for combo in itertools.combinations(range(len(spec.inequalities)), r):
            f = Polynomial.constant(n, 1)
            for i in combo:
                f = f * spec.inequalities[i]
            s_f = t - _half_degree(f)
            label = "ineq:" + ",".join(str(i + 1) for i in combo)
            if s_f < 0:
                log.debug("skipping block %s at t=%d (degree too high)", label, t)
                continue
            blocks.append(symbolic_localizer(f, s_f, index, label))

    if spec.ball is not None:
        coeffs = {(0,) * n: float(spec.ball) ** 2}
        for i in range(n):
            e = tuple(2 if j == i else 0 for j in range(n))
            coeffs[e] = -1.0
        ball = Polynomial(n, coeffs, exact=False)
        blocks.append(symbolic_localizer(ball, t - 1, index, "ball"))

    return RelaxationProblem(n, t, index, blocks, E)


def _generators_in_kernel(spec: ProblemSpec, M: np.ndarray, idx, t: int) -> bool:
    """The certificate only applies once every generator fits in (and lies in)
    the order-(t-2) kernel."""
    for h in spec.generators:
        if h.degree() > t - 2:
            return False
        if kernel_residual(M, idx, h.to_float()) > 10.0 * spec.tol:
            return False
    return True


def _best_fraction(x: float, window: float, max_den: int = 10**6):
    """Smallest-denominator rational within window of x, or None."""
    f = Fraction(x)
    if abs(f - f.limit_denominator(max_den)) > window:
        return None
    lo, hi = 1, max_den
    while lo < hi:
        mid = (lo + hi) // 2
        if abs(f - f.limit_denominator(mid)) <= window:
            hi = mid
        else:
            lo = mid + 1
    return f.limit_denominator(lo)


def rationalize_basis(elements, tol: float, generators) -> tuple:
    """Replace each coefficient by the smallest-denominator rational within
    tol; accept only when every generator reduces to zero against the
    rationalized set and the set passes the Groebner check.  On failure
    return the input unchanged with ok=False."""
    exact = []
    for p in elements:
        coeffs = {}
        for e, c in p.coeffs.items():
            r = _best_fraction(float(c), tol)
            if r is None:
                return list(elements), False
            if r != 0:
                coeffs[e] = r
        q = Polynomial(p.nvars, coeffs, exact=True)
        if q.is_zero or q.leading_exponent() != p.leading_exponent():
            return list(elements), False
        exact.append(q.monic())
    try:
        for h in generators:
            if not ordinary_normal_form(h, exact).is_zero:
                return list(elements), False
        if not groebner_verify(exact):
            return list(elements), False
    except ArithmeticError:
        return list(elements), False
    return exact, True


def _rationalize_strong(strong: PommaretBasis, spec: ProblemSpec) -> tuple:
    """Try rationalization windows from tight to loose; the exact NF and
    Groebner gates decide acceptance, so only the first gate-passing window
    matters."""
    windows = RATIONALIZE_WINDOWS
    if spec.rat_tol is not None:
        windows = (spec.rat_tol,) + tuple(w for w in windows if w != spec.rat_tol)
    for w in windows:
        if any(_junk_denominator(p, w) for p in strong.elements):
            continue
        out, ok = rationalize_basis(strong.elements, w, spec.generators)
        if ok:
            log.debug("rationalization succeeded at window %.1e", w)
            return out, True
    return list(strong.elements), False


def _junk_denominator(p: Polynomial, window: float, max_den: int = 10**4) -> bool:
    """True when some coefficient only rationalizes with a huge denominator,
    so running the exact gates at this window would be pointless and slow."""
    for c in p.coeffs.values():
        r = _best_fraction(float(c), window)
        if r is None or r.denominator > max_den:
            return True
    return False


def run(spec: ProblemSpec) -> CertificateReport:
    """Sweep relaxation orders until the certificate passes, the solver
    reports infeasibility, or the order budget runs out."""
    t0, t1 = sweep_bounds(spec)
    n = spec.order.n
    records = []
    solver = None
    for t in range(t0, t1 + 1):
        problem = build_relaxation(spec, t)
        res = solve_generic(problem, SolveOptions(max_iter=20000, rank_tol=spec.tol,
                                                  seed=spec.seed))
        if res.status == INFEASIBLE:
            log.info("t=%d: infeasible (%s)", t, res.message)
            return CertificateReport(
                INFEASIBLE,
                None,
                tuple(records),
                (),
                (),
                False,
                SolverInfo(res.residual_eq, 0.0, res.iterations, res.seed),
                res.message,
            )
        if res.status == NUMERICAL_FAILURE:
            log.warning("t=%d: solver failed (%s); moving on", t, res.message)
            continue
        y = res.y
        solver = SolverInfo(
            res.residual_eq,
            min(res.min_eigs.values()) if res.min_eigs else 0.0,
            res.iterations,
            res.seed,
        )

        decisions = []
        for ell in range(3):
            M = assemble_moment(y, t - ell)
            dec, _ = rank_and_nullspace(M, spec.tol)
            decisions.append(dec)
        ranks = tuple(dec.rank for dec in decisions)
        coranks = tuple(dec.corank for dec in decisions)
        try:
            basis = reduced_kernel_basis(
                assemble_moment(y, t - 1), build_index(n, t - 1), spec.tol
            )
            weak_cut = reduced_kernel_basis(
                assemble_moment(y, t - 2), build_index(n, t - 2), spec.tol
            )
        except ArithmeticError as exc:
            log.warning("t=%d: kernel reduction failed (%s); moving on", t, exc)
            continue
        profile = class_profile(weak_cut, t - 2)
        alpha = profile.alpha if profile.alpha else (0,) * n
        diff = coranks[1] - coranks[2]
        consistent = check_truncation(y, basis, t - 2, spec.tol)
        if not consistent:
            log.warning("t=%d: kernel truncation identity failed numerically", t)
        applicable = _generators_in_kernel(
            spec, assemble_moment(y, t - 2), build_index(n, t - 2), t
        )
        passed = (
            applicable
            and consistent
            and len(weak_cut) > 0
            and certificate_check(profile, coranks[1], coranks[2])
        )
        records.append(
            OrderRecord(t, ranks, coranks, alpha, profile.weighted_sum, diff, passed)
        )
        log.info(
            "t=%d: ranks %s coranks %s alpha %s sum %d diff %d -> %s",
            t, ranks, coranks, alpha, profile.weighted_sum, diff,
            "pass" if passed else "fail",
        )
        if not passed:
            continue

        strong = strong_from_weak(weak_cut.elements, drop_tol=spec.tol * 1e-2)
        strong_out, rationalized = _rationalize_strong(strong, spec)
        return CertificateReport(
            CERTIFIED,
            t,
            tuple(records),
            tuple(weak_cut.elements),
            tuple(strong_out),
            rationalized,
            solver,
        )
    return CertificateReport(
        EXHAUSTED_T,
        None,
        tuple(records),
        (),
        (),
        False,
        solver,
        f"no certificate up to t={t1}; a linear coordinate change may help",
    )


def _interreduce(gens) -> list:
    """Mutual exact reduction: no term of any element is divisible by another
    element's leading monomial."""
    gs = [g.monic() for g in gens if not g.is_zero]
    changed = True
    while changed:
        changed = False
        for i in range(len(gs)):
            rest = gs[:i] + gs[i + 1 :]
            r = ordinary_normal_form(gs[i], rest)
            if r.is_zero:
                gs.pop(i)
                changed = True
                break
            if r != gs[i]:
                gs[i] = r.monic()
                changed = True
    gs.sort(key=lambda p: grevlex_key(p.leading_exponent()))
    return gs


def _fraction_matrix(A) -> list:
    M = [[Fraction(x) for x in row] for row in A]
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("coordinate-change matrix must be square")
    return M


def _invert_exact(M: list) -> list:
    """Gauss-Jordan inverse over the rationals; raises on a singular matrix."""
    n = len(M)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ValueError("coordinate-change matrix is singular")
        A[col], A[piv] = A[piv], A[col]
        inv = Fraction(1) / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def apply_coordinate_change(spec: ProblemSpec, A) -> ProblemSpec:
    """Rewrite the system in new variables defined, in declared order, by
    (new_i) = sum_j A[i][j] (old_j); generators are inter-reduced exactly.
    The variable names are reused for the new coordinates."""
    Ad = _fraction_matrix(A)
    n = spec.order.n
    if len(Ad) != n:
        raise ValueError("coordinate-change matrix does not match the variable count")
    perm = [spec.names.index(nm) for nm in spec.order.names]
    Ai = [[Ad[perm[a]][perm[b]] for b in range(n)] for a in range(n)]
    inv = _invert_exact(Ai)
    images = [
        sum(
            (Polynomial.variable(n, i + 1).scale(inv[k][i]) for i in range(n) if inv[k][i] != 0),
            Polynomial.zero(n),
        )
        for k in range(n)
    ]
    new_gens = _interreduce([substitute(h, images) for h in spec.generators])
    if not new_gens:
        raise ValueError("generators collapsed to zero under the coordinate change")
    new_ineqs = [substitute(f, images).monic() for f in spec.inequalities]
    return replace(spec, generators=tuple(new_gens), inequalities=tuple(new_ineqs))


def random_coordinate_change(n: int, rng) -> list:
    """Small random integer matrix, resampled until invertible."""
    while True:
        A = [[Fraction(int(rng.integers(-2, 3))) for _ in range(n)] for _ in range(n)]
        try:
            _invert_exact([row[:] for row in A])
            return A
        except ValueError:
            continue


def run_with_retry(spec: ProblemSpec, retries: int = 3) -> tuple:
    """Run; after EXHAUSTED_T, retry with seeded random coordinate changes.
    Returns (report, coordinate matrix used or None)."""
    report = run(spec)
    if report.status != EXHAUSTED_T or retries <= 0:
        return report, None
    rng = np.random.default_rng(spec.seed)
    for attempt in range(retries):
        A = random_coordinate_change(spec.order.n, rng)
        log.info("retry %d with a random coordinate change", attempt + 1)
        try:
            spec2 = apply_coordinate_change(spec, A)
        except ValueError:
            continue
        report2 = run(spec2)
        if report2.status == CERTIFIED:
            return report2, A
    return report, None
