"""Exact large-n / large-s series and their numerical comparison."""

from .field import ONE, SQRT2, SQRT3, SQRT6, ZERO, AlgebraicNumber, TPoly
from .numeric import (
    ComparisonRecord,
    NumericComparison,
    double_scaling_checks,
    edge_location,
    fit_exponent,
    numeric_double_scaling,
    numeric_large_n_fixed_t,
    scaling_values,
)
from .series import (
    AlgebraicSeries,
    ScalingSeries,
    SeriesODE,
    SingularSolveError,
    TruncationError,
    Variable,
    compare_printed,
    derive_large_n_series,
    derive_scaling_series,
    printed_large_n_series,
    printed_scaling_series,
    series_ode_residual,
    solve_order_by_order,
)

__all__ = [
    "ONE",
    "SQRT2",
    "SQRT3",
    "SQRT6",
    "ZERO",
    "AlgebraicNumber",
    "AlgebraicSeries",
    "ComparisonRecord",
    "NumericComparison",
    "ScalingSeries",
    "SeriesODE",
    "SingularSolveError",
    "TPoly",
    "TruncationError",
    "Variable",
    "compare_printed",
    "derive_large_n_series",
    "derive_scaling_series",
    "double_scaling_checks",
    "edge_location",
    "fit_exponent",
    "numeric_double_scaling",
    "numeric_large_n_fixed_t",
    "printed_large_n_series",
    "printed_scaling_series",
    "scaling_values",
    "series_ode_residual",
    "solve_order_by_order",
]
