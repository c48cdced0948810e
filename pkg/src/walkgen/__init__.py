"""Weighted walk generating functions on graphs embedded in the positive integers."""

from .errors import (
    GraphFormatError,
    InsufficientOrderError,
    NonUnitError,
    NotASquareError,
    ResourceBudgetError,
    UsageError,
    WalkgenError,
)
from .grids import GridSpec, grid_oracle, lattice_return_series, polya_probability
from .series import (
    ConvergencePolicy,
    ConvergenceVerdict,
    Mode,
    TruncatedSeries,
    abel_extrapolate,
    classify_at_one,
)
from .theorems import evaluate, oracle_meta
from .verifier import enumerate_walks, verify_identities
from .walks import EdgeListOracle, FunctionOracle, WeightOracle, coefficients

__version__ = "0.1.0"

__all__ = [
    "ConvergencePolicy",
    "ConvergenceVerdict",
    "EdgeListOracle",
    "FunctionOracle",
    "GraphFormatError",
    "GridSpec",
    "InsufficientOrderError",
    "Mode",
    "NonUnitError",
    "NotASquareError",
    "ResourceBudgetError",
    "TruncatedSeries",
    "UsageError",
    "WalkgenError",
    "WeightOracle",
    "abel_extrapolate",
    "classify_at_one",
    "coefficients",
    "enumerate_walks",
    "evaluate",
    "grid_oracle",
    "lattice_return_series",
    "oracle_meta",
    "polya_probability",
    "verify_identities",
]
