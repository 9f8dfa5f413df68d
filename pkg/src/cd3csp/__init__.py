"""Deciding constraint instances over finite algebras with a two-step
chain of ternary term operations.

The pipeline propagates an instance to a k-minimal fixpoint, then shrinks
domains one step at a time: onto a proper ideal of the derived
multiplication when one exists, else through a maximal congruence with a
recursive solve and pullback, until every domain is simple and ideal-free
and the answer can be read off the pairwise entries.
"""

from .algebra import (
    Algebra,
    Cd3Report,
    Congruence,
    OperationTable,
    check_cd3,
    is_congruence,
    is_idempotent,
    is_simple,
    majority_algebra,
    maximal_proper_congruence,
    principal_congruence,
    product_algebra,
    quotient,
    require_cd3,
    restrict,
    subuniverse_closure,
    switch_algebra,
)
from .consistency import (
    KSystem,
    MinimalizedInstance,
    effective_instance,
    is_k_minimal,
    k_minimalize,
    make_subdirect,
)
from .errors import (
    Cd3Violation,
    CspError,
    EmptyDomain,
    EmptySubuniverse,
    FormatError,
    InvarianceViolation,
    LemmaViolation,
    NotACongruence,
    NotAnIdeal,
    NotASubuniverse,
    NotCd3,
    NotSubdirect,
)
from .fileio import (
    read_algebra,
    read_instance,
    write_algebra,
    write_instance,
)
from .generators import (
    RNG_ALGORITHM,
    GeneratorConfig,
    gen_cd3_algebra,
    gen_instance,
)
from .jonsson import (
    BinaryClassification,
    DistanceProfile,
    IdealReduction,
    build_lambda_J,
    classify_binary,
    distance_profile,
    is_jonsson_trivial,
    jonsson_ideal,
    mult,
    reduce_constraint_RJ,
    some_proper_ideal,
)
from .lemmas import SUITES, SuiteReport, run_suite
from .relation import (
    Constraint,
    Instance,
    Relation,
    Signature,
    constraint_from_raw,
    generated_subpower,
    is_invariant,
    is_subdirect,
    natural_join,
    project,
    satisfies,
    scope_algebras,
    validate_invariance,
)
from .solver import (
    AlmostTrivialDecomposition,
    QuotientPlan,
    SolveOutcome,
    almost_trivial_decomposition,
    base_case_solve,
    brute_force_solve,
    choose_k,
    choose_mode,
    pullback,
    quotient_reduce,
    reduce_to_ideal,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "AlmostTrivialDecomposition",
    "BinaryClassification",
    "Cd3Report",
    "Cd3Violation",
    "Congruence",
    "Constraint",
    "CspError",
    "DistanceProfile",
    "EmptyDomain",
    "EmptySubuniverse",
    "FormatError",
    "GeneratorConfig",
    "IdealReduction",
    "Instance",
    "InvarianceViolation",
    "KSystem",
    "LemmaViolation",
    "MinimalizedInstance",
    "NotACongruence",
    "NotAnIdeal",
    "NotASubuniverse",
    "NotCd3",
    "NotSubdirect",
    "OperationTable",
    "QuotientPlan",
    "RNG_ALGORITHM",
    "Relation",
    "SUITES",
    "Signature",
    "SolveOutcome",
    "SuiteReport",
    "almost_trivial_decomposition",
    "base_case_solve",
    "brute_force_solve",
    "build_lambda_J",
    "check_cd3",
    "choose_k",
    "choose_mode",
    "classify_binary",
    "constraint_from_raw",
    "distance_profile",
    "effective_instance",
    "gen_cd3_algebra",
    "gen_instance",
    "generated_subpower",
    "is_congruence",
    "is_idempotent",
    "is_invariant",
    "is_jonsson_trivial",
    "is_k_minimal",
    "is_simple",
    "is_subdirect",
    "jonsson_ideal",
    "k_minimalize",
    "majority_algebra",
    "make_subdirect",
    "maximal_proper_congruence",
    "mult",
    "natural_join",
    "principal_congruence",
    "product_algebra",
    "project",
    "pullback",
    "quotient",
    "quotient_reduce",
    "read_algebra",
    "read_instance",
    "reduce_constraint_RJ",
    "reduce_to_ideal",
    "require_cd3",
    "restrict",
    "run_suite",
    "satisfies",
    "scope_algebras",
    "solve",
    "some_proper_ideal",
    "subuniverse_closure",
    "switch_algebra",
    "validate_invariance",
    "write_algebra",
    "write_instance",
]
