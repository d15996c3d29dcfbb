"""Feasibility solver for moment relaxations, returning a maximum-rank
(generic) moment vector or an infeasibility verdict.

All constraints except the normalization y_0 = 1 are homogeneous: linear
equalities E y = 0 from the localizing equality blocks, and PSD conditions
S_b(y) >= 0 on the moment block and any localizing inequality blocks.  The
feasible set is therefore the y_0 = 1 slice of a closed pointed convex cone
(pointed because the moment block vanishes only at y = 0).  Slicing the cone
by tr S_moment(y) = 1 instead gives a compact cross-section even when the
y_0 = 1 slice is unbounded, so analytic centering is always well posed:

1. eliminate E y = 0 by an orthonormal nullspace basis y = N u;
2. restrict each block to the orthogonal complement of its linearly forced
   kernel (the common nullspace of S_b over the whole subspace), so the
   barrier is finite;
3. damped-Newton maximize sum_b log det(S_b + eps I) over the cross-section
   along a decreasing-shift path eps -> 0;
4. the final center approximates the analytic center of the cross-section,
   which lies in its relative interior, so the moment-matrix kernel at the
   working tolerance is minimal among all feasible points; rescaling by
   1/y_0 yields the generic normalized moment vector.

Eigendirections forced to the boundary surface at the bottom of the path at
a level set by how strongly the geometry pins them, so a loose rank
tolerance can accept a kernel direction that a tight tolerance legitimately
resolves as nonzero; rank profiles honestly reflect that resolution limit.

Infeasibility shows up as (a) no unit-trace point in the constrained
subspace, (b) a shift path that stalls with an eigenvalue bounded away below
zero, or (c) a center with y_0 = 0, meaning the constant monomial lies in
every feasible kernel.  The solver is deterministic and uses no randomness;
the seed is only consumed by certify_genericity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .linalg import nullspace_rows, rank_and_nullspace
from .moment import BlockStructure, MomentVector, MonomialIndex, assemble_moment

log = logging.getLogger("realrad.sdp")

GENERIC_POINT = "GENERIC_POINT"
INFEASIBLE = "INFEASIBLE"
NUMERICAL_FAILURE = "NUMERICAL_FAILURE"


@dataclass(frozen=True)
class RelaxationProblem:
    """Feasibility problem over moment vectors of order 2t.

    blocks[0] is always the moment block; further blocks are localizing PSD
    blocks of inequality products.  eq_rows are deduplicated homogeneous
    linear forms over the moment positions.
    """

    n: int
    t: int
    index: MonomialIndex
    blocks: list
    eq_rows: np.ndarray

    def __post_init__(self):
        if not self.blocks or self.blocks[0].label != "moment":
            raise ValueError("blocks must start with the moment block")
        if self.eq_rows.size and self.eq_rows.shape[1] != len(self.index):
            raise ValueError("equality rows do not match the moment index")


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 2000
    feas_tol: float = 1e-8
    rank_tol: float = 1e-8
    seed: int = 0


@dataclass(frozen=True)
class SolveResult:
    y: MomentVector | None
    status: str
    residual_eq: float
    min_eigs: dict
    iterations: int
    seed: int
    message: str = ""


class _Block:
    """One PSD block restricted to the complement of its forced kernel."""

    __slots__ = ("structure", "P", "C0", "CK", "scale", "r")

    def __init__(self, structure: BlockStructure, N: np.ndarray, u_p: np.ndarray, Z: np.ndarray):
        q = N.shape[1]
        m = structure.size
        B = np.empty((q, m, m))
        for k in range(q):
            B[k] = structure.assemble(N[:, k])
        G = B.reshape(q * m, m)
        _, sv, Vt = np.linalg.svd(G, full_matrices=True)
        r = int(np.count_nonzero(sv > 1e-12 * sv[0])) if sv.size else 0
        self.P = Vt[:r].T.copy()
        self.r = r
        self.scale = structure.coeff_scale
        self.structure = structure
        S0 = np.tensordot(u_p, B, axes=1)
        self.C0 = self.P.T @ S0 @ self.P
        CKfull = np.tensordot(Z.T, B.reshape(q, m * m), axes=1).reshape(-1, m, m)
        self.CK = np.matmul(np.matmul(self.P.T, CKfull), self.P)

    def matrix(self, w: np.ndarray) -> np.ndarray:
        S = self.C0.copy()
        if w.size:
            S += np.tensordot(w, self.CK, axes=1)
        return S


class _State:
    """Equalities eliminated and blocks restricted, over the cross-section
    tr S_moment(y) = 1 parametrized as u = u_p + Z w.

    N overrides the nullspace basis, restricting the solve to a smaller
    subspace than the equality rows alone dictate.
    """

    def __init__(self, problem: RelaxationProblem, N: np.ndarray | None = None):
        P = len(problem.index)
        E = problem.eq_rows if problem.eq_rows.size else np.zeros((0, P))
        self.E = E
        self.N = nullspace_rows(E) if N is None else N
        self.q = self.N.shape[1]
        self.feasible_space = self.q > 0
        if not self.feasible_space:
            return
        tr = np.zeros(P)
        mom = problem.blocks[0]
        diag = mom.ii == mom.jj
        np.add.at(tr, mom.pp[diag], mom.cc[diag])
        c_u = self.N.T @ tr
        self.section_exists = float(np.linalg.norm(c_u)) > 1e-12
        if not self.section_exists:
            return
        self.u_p = c_u / float(c_u @ c_u)
        self.Z = nullspace_rows(c_u.reshape(1, -1))
        self.K = self.Z.shape[1]
        self.blocks = [
            b
            for b in (_Block(s, self.N, self.u_p, self.Z) for s in problem.blocks)
            if b.r > 0
        ]

    def y_of(self, w: np.ndarray) -> np.ndarray:
        u = self.u_p + (self.Z @ w if w.size else 0.0)
        return self.N @ u


def _chol_all(state: _State, w: np.ndarray, eps: float):
    """Cholesky factors of every shifted block, or None if any fails."""
    Ls = []
    for b in state.blocks:
        S = b.matrix(w)
        S.flat[:: b.r + 1] += eps * b.scale
        try:
            Ls.append(np.linalg.cholesky(S))
        except np.linalg.LinAlgError:
            return None
    return Ls


def _barrier_value(Ls) -> float:
    return float(sum(2.0 * np.sum(np.log(np.diag(L))) for L in Ls))


def _center(state: _State, w: np.ndarray, eps: float, lin: np.ndarray | None = None,
            dec_tol: float = 1e-11, max_newton: int = 80):
    """Damped Newton maximization of lin.w + sum_b log det(S_b + eps*scale*I).

    Returns (w, iterations, converged).  w must satisfy the shifted PD
    condition on entry.
    """
    if state.K == 0:
        return w, 0, True
    iters = 0
    Ls = _chol_all(state, w, eps)
    if Ls is None:
        return w, 0, False
    F = _barrier_value(Ls) + (float(lin @ w) if lin is not None else 0.0)
    for _ in range(max_newton):
        g = np.zeros(state.K)
        H = np.zeros((state.K, state.K))
        for b, L in zip(state.blocks, Ls):
            Linv = solve_triangular(L, np.eye(b.r), lower=True)
            T = np.matmul(np.matmul(Linv, b.CK), Linv.T)
            g += np.trace(T, axis1=1, axis2=2)
            Tf = T.reshape(state.K, -1)
            H += Tf @ Tf.T
        if lin is not None:
            g = g + lin
        try:
            d = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            H.flat[:: state.K + 1] += 1e-12 * (1.0 + np.trace(H) / state.K)
            d = np.linalg.solve(H, g)
        dec = float(g @ d)
        if not np.isfinite(dec):
            return w, iters, False
        if dec <= dec_tol:
            return w, iters, True
        alpha = 1.0
        while alpha > 1e-14:
            w2 = w + alpha * d
            Ls2 = _chol_all(state, w2, eps)
            if Ls2 is not None:
                F2 = _barrier_value(Ls2) + (float(lin @ w2) if lin is not None else 0.0)
                if F2 >= F + 0.25 * alpha * dec:
                    w, Ls, F = w2, Ls2, F2
                    break
            alpha *= 0.5
        else:
            # Line search exhausted: stuck, not converged.
            return w, iters, False
        iters += 1
    return w, iters, False


def _min_eig_rel(state: _State, w: np.ndarray) -> float:
    """Smallest unshifted block eigenvalue relative to the block scale."""
    worst = np.inf
    for b in state.blocks:
        lam = np.linalg.eigvalsh(b.matrix(w))
        worst = min(worst, lam[0] / b.scale)
    return float(worst)


def _pressure_span(problem: RelaxationProblem, state: _State,
                   w: np.ndarray, rank_tol: float):
    """Orthonormal basis of the order-(t-1) tolerance kernel at the current
    point together with its variable prolongations, over the moment block.

    Kernel nesting across orders says a kernel polynomial of the truncated
    matrix stays in the kernel when the order grows, so these directions
    carry no measure mass.  Returns an (m, r) column basis, or None when the
    order-(t-1) kernel is empty.
    """
    mom = problem.blocks[0]
    m = mom.size
    exps = problem.index.exponents[:m]
    m1 = sum(1 for e in exps if sum(e) <= problem.t - 1)
    if m1 == 0:
        return None
    y_raw = state.y_of(w)
    if y_raw[0] <= 1e-9 * float(np.max(np.abs(y_raw))):
        return None
    S1 = mom.assemble(y_raw / y_raw[0])[:m1, :m1]
    lam1, U1 = np.linalg.eigh(S1)
    K1 = U1[:, lam1 <= rank_tol * max(1.0, lam1[-1])]
    if K1.shape[1] == 0:
        return None
    pos = problem.index.position
    cols = [np.pad(K1[:, j], (0, m - m1)) for j in range(K1.shape[1])]
    for j in range(K1.shape[1]):
        for k in range(problem.n):
            v = np.zeros(m)
            for i in range(m1):
                c = K1[i, j]
                if c != 0.0:
                    e = list(exps[i])
                    e[k] += 1
                    v[pos[tuple(e)]] = c
            cols.append(v)
    # Kernel estimates carry noise near the eigenvalue scale; spurious
    # prolongation directions fall well below the O(1) structural ones.
    U2, s2, _ = np.linalg.svd(np.column_stack(cols), full_matrices=False)
    r2 = int(np.count_nonzero(s2 > 1e-2 * s2[0])) if s2.size else 0
    if r2 == 0:
        return None
    return U2[:, :r2]


def _build_result(problem, state, w, iters, seed, feas_tol, message=""):
    y_raw = state.y_of(w)
    y0 = y_raw[0]
    ymax = float(np.max(np.abs(y_raw)))
    if y0 <= 1e-9 * ymax:
        return SolveResult(None, INFEASIBLE, 0.0, {}, iters, seed,
                           "constant monomial forced to zero (kernel contains 1)")
    y_vals = y_raw / y0
    y = MomentVector(problem.n, 2 * problem.t, y_vals, problem.index)
    residual = float(np.max(np.abs(problem.eq_rows @ y_vals))) if problem.eq_rows.size else 0.0
    min_eigs = {}
    for s in problem.blocks:
        lam = np.linalg.eigvalsh(s.assemble(y_vals))
        min_eigs[s.label] = float(lam[0])
    status = GENERIC_POINT
    if residual > feas_tol or min(min_eigs.values()) < -feas_tol:
        status = NUMERICAL_FAILURE
        message = message or "final point violates the feasibility tolerances"
    return SolveResult(y, status, residual, min_eigs, iters, seed, message)


def _center_path(state: _State, iter_cap: int):
    """Decreasing-shift path from scratch to the analytic center.

    Returns (w, iterations, error) with error None on success or a
    (status, message) pair.
    """
    w = np.zeros(state.K)
    total = 0
    if not state.blocks:
        return w, total, None
    eps = max(1.0, -1.5 * _min_eig_rel(state, w))
    while True:
        w, it, ok = _center(state, w, eps,
                            dec_tol=(1e-11 if eps < 1e-6 else 1e-8))
        total += it
        if total > iter_cap:
            return w, total, (NUMERICAL_FAILURE, "iteration limit exceeded")
        if eps <= 1e-12:
            break
        next_eps = eps * 0.1
        shrink_tries = 0
        stalled = False
        while _chol_all(state, w, next_eps) is None:
            next_eps = np.sqrt(next_eps * eps)
            shrink_tries += 1
            if shrink_tries > 10 or next_eps > 0.95 * eps:
                stalled = True
                break
        if stalled:
            lam = _min_eig_rel(state, w)
            if lam <= -1e-7:
                return w, total, (INFEASIBLE,
                                  f"no PSD point on the cross-section "
                                  f"(best relative eigenvalue {lam:.2e})")
            return w, total, (NUMERICAL_FAILURE,
                              "shift path stalled near the PSD boundary")
        eps = next_eps
    w, it, _ = _center(state, w, 0.0, dec_tol=1e-12, max_newton=40)
    total += it
    return w, total, None


def solve_generic(problem: RelaxationProblem, opts: SolveOptions | None = None) -> SolveResult:
    """Return a generic (maximum-rank) point of the relaxation, or detect
    infeasibility.  Deterministic: identical problems give identical results."""
    opts = opts or SolveOptions()
    state = _State(problem)
    if not state.feasible_space:
        return SolveResult(None, INFEASIBLE, 0.0, {}, 0, opts.seed,
                           "equality constraints only admit the zero sequence")
    if not state.section_exists:
        return SolveResult(None, INFEASIBLE, 0.0, {}, 0, opts.seed,
                           "no unit-trace moment sequence satisfies the constraints")
    w, total_iters, err = _center_path(state, opts.max_iter)
    if err is not None:
        return SolveResult(None, err[0], 0.0, {}, total_iters, opts.seed, err[1])
    # Pressure phase: restrict the solve to the face where variable
    # prolongations of the order-(t-1) kernel join the order-t kernel
    # (kernel nesting across orders) and recenter there.  The restriction is
    # a tolerant projection: kernel estimates carry noise at roughly the
    # eigenvalue scale, so only projected directions with singular value
    # well above that noise are cut; honoring the rows exactly would exclude
    # the measure points themselves.  Bites go from near-machine kernel to
    # the working tolerance, clean directions first.
    mom = problem.blocks[0]
    P = len(problem.index)
    face_state, w_face = state, w
    for cut in (min(1e-9, opts.rank_tol), opts.rank_tol, opts.rank_tol):
        Q = _pressure_span(problem, face_state, w_face, cut)
        if Q is None:
            continue
        rows = np.vstack([mom.kernel_rows(Q[:, i], P) for i in range(Q.shape[1])])
        norms = np.linalg.norm(rows, axis=1)
        rows = rows[norms > 0] / norms[norms > 0, None]
        if rows.shape[0] == 0:
            continue
        _, sv, Vt = np.linalg.svd(rows @ face_state.N, full_matrices=True)
        if sv.size == 0 or sv[0] < 0.1:
            continue
        ncut = int(np.count_nonzero(sv > 1e-2 * sv[0]))
        if ncut == 0 or ncut >= face_state.q:
            continue
        st2 = _State(problem, N=face_state.N @ Vt[ncut:].T)
        if not (st2.feasible_space and st2.section_exists):
            continue
        w2, it2, err2 = _center_path(st2, opts.max_iter - total_iters)
        total_iters += it2
        if err2 is not None:
            continue
        face_state, w_face = st2, w2
    if face_state is not state:
        # Step back into the interior: lift every pressed direction to a
        # uniform small positive quadratic-form value via the minimum-norm
        # correction inside the original equality nullspace.  The level sits
        # above the feasibility floor, so the pressed directions read as
        # rank-deficient at coarse tolerances without overstating precision.
        y_face = face_state.y_of(w_face)
        w = state.Z.T @ (state.N.T @ y_face - state.u_p) if state.K else np.zeros(0)
        Qb = _pressure_span(problem, face_state, w_face, opts.rank_tol)
        if Qb is not None and state.K:
            r = Qb.shape[1]
            kr = [mom.kernel_rows(Qb[:, i], P) for i in range(r)]
            pair_rows = [Qb[:, i] @ kr[j] for i in range(r) for j in range(i, r)]
            diag = np.array([1.0 if i == j else 0.0
                             for i in range(r) for j in range(i, r)])
            rows = np.vstack(pair_rows)
            A = rows @ state.N @ state.Z
            beta = 3e-8 * y_face[0]
            target = beta * diag - rows @ y_face
            dw = np.linalg.lstsq(A, target, rcond=1e-2)[0]
            w_try = w + dw
            y_try = state.y_of(w_try)
            if y_try[0] > 1e-9 * float(np.max(np.abs(y_try))):
                y_n = y_try / y_try[0]
                lam = min(float(np.linalg.eigvalsh(s.assemble(y_n))[0])
                          for s in problem.blocks)
                if lam > -0.9 * opts.feas_tol:
                    w = w_try
    return _build_result(problem, state, w, total_iters, opts.seed, opts.feas_tol)


def certify_genericity(problem: RelaxationProblem, y: MomentVector, trials: int,
                       tol: float = 1e-8, seed: int = 0) -> bool:
    """Heuristic check that y attains the maximum moment-matrix rank: biased
    re-solves must never exceed its rank, and its kernel must lie in every
    perturbed kernel."""
    M = assemble_moment(y, problem.t)
    dec, null = rank_and_nullspace(M, tol)
    rng = np.random.default_rng(seed)
    state = _State(problem)
    if not (state.feasible_space and state.section_exists):
        raise ValueError("problem is infeasible; nothing to certify")
    for _ in range(trials):
        g = rng.standard_normal(state.K) if state.K else np.zeros(0)
        nrm = float(np.linalg.norm(g))
        if nrm > 0:
            g /= nrm
        w = np.zeros(state.K)
        lam0 = _min_eig_rel(state, w)
        eps = max(1.0, -1.5 * lam0)
        while True:
            w, _, _ = _center(state, w, eps, lin=50.0 * g, dec_tol=1e-9)
            if eps <= 1e-6:
                break
            eps *= 0.1
        y_raw = state.y_of(w)
        if y_raw[0] <= 1e-9 * np.max(np.abs(y_raw)):
            return False
        yp = y_raw / y_raw[0]
        Mp = assemble_moment(MomentVector(problem.n, 2 * problem.t, yp, problem.index), problem.t)
        dec_p, _ = rank_and_nullspace(Mp, tol)
        if dec_p.rank > dec.rank:
            return False
        if null.size:
            sv1 = np.linalg.norm(Mp, 2)
            if np.max(np.abs(Mp @ null)) > 10.0 * tol * max(1.0, sv1):
                return False
    return True
