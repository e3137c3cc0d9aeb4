"""Crossed products of partial step maps on real intervals.

The package builds cylinder algebras over a partial bijection of an
interval, represents them by finite matrices on orbit windows, carries a
deformed product on angle modes with a small-step classical limit, and
cross-checks everything against an exact finite-set model.
"""

from .interval import DEFAULT_TOL, Interval, image_monotone
from .functions import (
    SUPPORT_TOL,
    SupportViolation,
    SupportedFunction,
    constant,
    exp_wave,
    from_descriptor,
    partial_identity,
    polynomial,
    pullback,
    sqrt_affine,
    zero_function,
)
from .bijection import (
    FAMILY_KINDS,
    BijectionFamily,
    PartialBijection,
    SemigroupElement,
    canonicalize,
    compose,
    empty_bijection,
    family_from_descriptor,
    family_to_descriptor,
    identity_on,
    make_family,
    poincare_validity_bound,
    power,
    restricted_shift_action,
)
from .crossed import (
    CrossedProductAlgebra,
    CrossedProductElement,
    Cylinder,
    equal_as_cyl,
    fixed_point_subalgebra_check,
    make_cylinder,
    u_relations_check,
)
from .represent import (
    MatrixRep,
    OrbitSpec,
    build_orbit,
    covariance_check,
    matrix_rep,
    represent,
)
from .star import (
    AliasingError,
    CylinderFunction,
    PoissonCoefficient,
    classical_limit_check,
    poisson_bracket,
    psi,
    psi_inv,
    star,
)
from .oracle import (
    FiniteAlgebraElement,
    FiniteCrossedProduct,
    FinitePartialBijection,
    GridIncompatible,
    finite_orbit,
    oracle_covariant_rep,
    oracle_represent,
    sample_element,
    sample_interval_to_finite,
)
from .twogen import (
    PROFILE_KINDS,
    CommutatorProfile,
    PoincareConstants,
    Reparametrization,
    TwoGenSetup,
    boundary_continuity_check,
    conjugated_action,
    defining_equation_residual,
    poincare_constants,
    solve_action_from_profile,
    standard_setup,
    two_gen_relations,
)
from .exprgrammar import ExpressionError, compile_expression

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "BijectionFamily",
    "CommutatorProfile",
    "CrossedProductAlgebra",
    "CrossedProductElement",
    "Cylinder",
    "CylinderFunction",
    "DEFAULT_TOL",
    "ExpressionError",
    "FAMILY_KINDS",
    "FiniteAlgebraElement",
    "FiniteCrossedProduct",
    "FinitePartialBijection",
    "GridIncompatible",
    "Interval",
    "MatrixRep",
    "OrbitSpec",
    "PROFILE_KINDS",
    "PartialBijection",
    "PoincareConstants",
    "PoissonCoefficient",
    "Reparametrization",
    "SUPPORT_TOL",
    "SemigroupElement",
    "SupportViolation",
    "SupportedFunction",
    "TwoGenSetup",
    "boundary_continuity_check",
    "build_orbit",
    "canonicalize",
    "classical_limit_check",
    "compile_expression",
    "compose",
    "conjugated_action",
    "constant",
    "covariance_check",
    "defining_equation_residual",
    "empty_bijection",
    "equal_as_cyl",
    "exp_wave",
    "family_from_descriptor",
    "family_to_descriptor",
    "finite_orbit",
    "fixed_point_subalgebra_check",
    "from_descriptor",
    "identity_on",
    "image_monotone",
    "make_cylinder",
    "make_family",
    "matrix_rep",
    "oracle_covariant_rep",
    "oracle_represent",
    "partial_identity",
    "poincare_constants",
    "poincare_validity_bound",
    "poisson_bracket",
    "polynomial",
    "power",
    "psi",
    "psi_inv",
    "pullback",
    "represent",
    "restricted_shift_action",
    "sample_element",
    "sample_interval_to_finite",
    "solve_action_from_profile",
    "sqrt_affine",
    "standard_setup",
    "star",
    "two_gen_relations",
    "u_relations_check",
    "zero_function",
]
