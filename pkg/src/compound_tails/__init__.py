"""Exact asymptotic expansions for tails of compound sums with Weibull-type summands."""
from .coeff_ring import ParamPoly, Rational, parse_poly, parse_rational
from .compound import (
    CustomPmf,
    Degenerate,
    Geometric,
    Poisson,
    compound_character,
    laplace_character,
    weibull_moments,
)
from .operator_ring import M_MAX, TruncatedOperator, op_identity
from .tails import (
    SummandSpec,
    TailExpansion,
    TailTerm,
    evaluate_expansion,
    expansion,
    validate_summand,
)

__all__ = [
    "CustomPmf",
    "Degenerate",
    "Geometric",
    "M_MAX",
    "ParamPoly",
    "Poisson",
    "Rational",
    "SummandSpec",
    "TailExpansion",
    "TailTerm",
    "TruncatedOperator",
    "compound_character",
    "evaluate_expansion",
    "expansion",
    "laplace_character",
    "op_identity",
    "parse_poly",
    "parse_rational",
    "validate_summand",
    "weibull_moments",
]
