"""Conjugations, canonical factorization, and complex-symmetry criteria for
truncated Toeplitz operators, in one variable, on the polydisc, and exactly
in finite dimensions."""

from .core import (
    ConjtoepError,
    ExactnessError,
    Tolerance,
    Window,
    frobenius_distance,
    is_unitary_on_window,
    random_symmetric_unitary,
    random_unitary,
)
from .hardy import (
    LaurentSymbol,
    ShiftOperator,
    TruncatedOperator,
    is_toeplitz,
    s_toeplitz_residual,
    toeplitz_matrix,
)
from .conjugation import (
    AlphaDiagonal,
    Banded,
    BasisSpec,
    CanonicalJ,
    Composition,
    Conjugation,
    ExactFinite,
    FromBasis,
    Geometric,
    ThetaXi,
    apply_conjugation,
    canonical_factorization,
    conjugation_from_fixed_basis,
    intertwine_lambda,
    is_conjugation,
    materialize,
    parse_family_spec,
    shift_from_conjugation,
)
from .composition import (
    CompositionParams,
    TrigpolyGrid,
    check_w_symmetry_conditions,
    composition_matrix,
    scan_trigpoly_theorem,
    u_entry,
    u_entry_oracle,
)
from .symmetry import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    CheckConfig,
    CriterionDisagreement,
    SymmetryReport,
    XYSystem,
    build_xy,
    check_coefficient_equations,
    check_conjugated_toeplitz,
    check_definition,
    check_s_toeplitz_necessary,
    check_transpose_basis,
    check_xy,
    run_all,
)
from .polydisc import (
    BoxTruncation,
    PolySymbol,
    check_poly_criterion,
    doubly_commuting_residual,
    poly_check_definition,
    poly_conjugation,
    poly_toeplitz,
)
from .finite import (
    FiniteToeplitz,
    finite_symmetry_criterion,
    general_symmetry,
    toeplitz_conjugation,
)

__version__ = "0.1.0"
