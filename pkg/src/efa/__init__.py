"""Exceptional values of E-functions, computed exactly."""

from .arith import QQ, AlgebraicNumber, KElement, NumberField
from .desingular import (
    ExceptionalSet,
    TransformMatrix,
    compute_M,
    desingularize,
    exceptional_derivative_values,
    exceptional_points,
    polynomial_part_decomposition,
    relations_at_singularity,
    remove_singularity,
)
from .inhomog import InhomEq, SystemMatrix, minimal_inhomogeneous, normalize, transcendence_verdict
from .io import parse_input
from .minhomog import certify_relation, cokernel_candidates, find_min_operator
from .numeric import corroborate, evaluate_series
from .operators import DiffOp, Recurrence, annihilator_of_image, op_mul, to_recurrence
from .poly import KPoly, KRatFun, factor, roots_with_multiplicity
from .ratsol import LinearSystem, rational_solution_basis
from .report import AnalysisConfig, AnalysisReport, analyze, report_from_json, verify_report
from .series import (
    EFunctionInput,
    InputValidationError,
    InternalInconsistencyError,
    LazySeries,
    coefficients,
    combination_constant_term,
)

__all__ = [
    "QQ",
    "AlgebraicNumber",
    "AnalysisConfig",
    "AnalysisReport",
    "DiffOp",
    "EFunctionInput",
    "ExceptionalSet",
    "InhomEq",
    "InputValidationError",
    "InternalInconsistencyError",
    "KElement",
    "KPoly",
    "KRatFun",
    "LazySeries",
    "LinearSystem",
    "NumberField",
    "Recurrence",
    "SystemMatrix",
    "TransformMatrix",
    "analyze",
    "annihilator_of_image",
    "certify_relation",
    "coefficients",
    "cokernel_candidates",
    "combination_constant_term",
    "compute_M",
    "corroborate",
    "desingularize",
    "evaluate_series",
    "exceptional_derivative_values",
    "exceptional_points",
    "factor",
    "find_min_operator",
    "minimal_inhomogeneous",
    "normalize",
    "op_mul",
    "parse_input",
    "polynomial_part_decomposition",
    "rational_solution_basis",
    "relations_at_singularity",
    "remove_singularity",
    "report_from_json",
    "roots_with_multiplicity",
    "to_recurrence",
    "transcendence_verdict",
    "verify_report",
]
