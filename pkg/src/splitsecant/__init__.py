"""Exact finite-field verification of secant dimensions of split-form varieties."""

__version__ = "0.1.0"

from .config import RunConfig
from .gfp import FieldMatrix, PrimeField, RankBuilder, rank
from .numbers import FunctionSpec, binomial, builtin, parse_function_spec, stirling2
from .statements import (
    Abundancy,
    StatementOutcome,
    StatementParams,
    Verdict,
    a_value,
    abundancy,
    evaluate_statement,
    parse_descriptor,
)
from .secant import SecantQuery, SecantReport, d2_defect, expected_projective_dim, secant_dim
from .induction import (
    exp_bound,
    restriction_fixed_degree,
    restriction_fixed_dimension,
    small_s_enumerate,
    small_s_verify,
    splitting_graph,
    verify_by_splitting,
)

__all__ = [
    "Abundancy", "FieldMatrix", "FunctionSpec", "PrimeField", "RankBuilder", "RunConfig",
    "SecantQuery", "SecantReport", "StatementOutcome", "StatementParams", "Verdict",
    "a_value", "abundancy", "binomial", "builtin", "d2_defect", "evaluate_statement",
    "exp_bound", "expected_projective_dim", "parse_descriptor", "parse_function_spec", "rank",
    "restriction_fixed_degree", "restriction_fixed_dimension", "secant_dim",
    "small_s_enumerate", "small_s_verify", "splitting_graph", "stirling2", "verify_by_splitting",
]
