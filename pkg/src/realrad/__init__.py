"""Numerical certificates and generator bases for the real radical of a
polynomial ideal.

Feed a polynomial system in; the package sweeps moment-relaxation orders,
finds a generic feasible moment sequence per order, reads generator
candidates off the moment-matrix kernel, and stops when a combinatorial
certificate guarantees the candidates form a Pommaret (hence Groebner) basis
of the ideal they generate.
"""

from .kernel import (
    ReducedBasis,
    check_truncation,
    corank_profile,
    kernel_residual,
    reduced_kernel_basis,
    truncate_basis,
)
from .linalg import RankDecision, rank_and_nullspace, reduce_rows
from .moment import (
    MomentVector,
    MonomialIndex,
    assemble_localizer,
    assemble_moment,
    build_index,
    moment_vector,
    symbolic_localizer,
    vect,
)
from .pipeline import (
    CERTIFIED,
    EXHAUSTED_T,
    CertificateReport,
    OrderRecord,
    ProblemSpec,
    SolverInfo,
    apply_coordinate_change,
    build_relaxation,
    rationalize_basis,
    run,
    run_with_retry,
    spec_from_text,
    sweep_bounds,
)
from .poly import (
    ParseError,
    Polynomial,
    VariableOrder,
    class_of,
    class_of_poly,
    format_poly,
    grevlex_compare,
    grevlex_key,
    parse_polynomial,
    parse_system,
    substitute,
)
from .pommaret import (
    ClassProfile,
    PommaretBasis,
    certificate_check,
    class_profile,
    groebner_verify,
    involutive_normal_form,
    involutively_divides,
    multiplicative_variables,
    ordinary_normal_form,
    strong_from_weak,
)
from .sdp import (
    GENERIC_POINT,
    INFEASIBLE,
    NUMERICAL_FAILURE,
    RelaxationProblem,
    SolveOptions,
    SolveResult,
    certify_genericity,
    solve_generic,
)

__version__ = "0.1.0"

__all__ = [
    "CERTIFIED",
    "CertificateReport",
    "ClassProfile",
    "EXHAUSTED_T",
    "GENERIC_POINT",
    "INFEASIBLE",
    "MomentVector",
    "MonomialIndex",
    "NUMERICAL_FAILURE",
    "OrderRecord",
    "ParseError",
    "PommaretBasis",
    "Polynomial",
    "ProblemSpec",
    "RankDecision",
    "ReducedBasis",
    "RelaxationProblem",
    "SolveOptions",
    "SolveResult",
    "SolverInfo",
    "VariableOrder",
    "apply_coordinate_change",
    "assemble_localizer",
    "assemble_moment",
    "build_index",
    "build_relaxation",
    "certificate_check",
    "certify_genericity",
    "check_truncation",
    "class_of",
    "class_of_poly",
    "class_profile",
    "corank_profile",
    "format_poly",
    "grevlex_compare",
    "grevlex_key",
    "groebner_verify",
    "involutive_normal_form",
    "involutively_divides",
    "kernel_residual",
    "moment_vector",
    "multiplicative_variables",
    "ordinary_normal_form",
    "parse_polynomial",
    "parse_system",
    "rank_and_nullspace",
    "rationalize_basis",
    "reduce_rows",
    "reduced_kernel_basis",
    "run",
    "run_with_retry",
    "solve_generic",
    "spec_from_text",
    "strong_from_weak",
    "substitute",
    "sweep_bounds",
    "symbolic_localizer",
    "truncate_basis",
    "vect",
]
