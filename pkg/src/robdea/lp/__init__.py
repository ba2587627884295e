"""Small dense LP solver used by every DEA model in the package."""

from ._kernel import available_backends, backend_name, use_backend
from .solver import (
    TAU_FEAS,
    TAU_OPT,
    TAU_PIVOT,
    Constraint,
    ConstraintSystem,
    InvalidInputError,
    LinearProgram,
    LPError,
    LpSolution,
    NumericFailure,
    Relation,
    Sense,
    Status,
    is_feasible,
    solve,
)

__all__ = [
    "TAU_FEAS", "TAU_OPT", "TAU_PIVOT", "Constraint", "ConstraintSystem", "InvalidInputError",
    "LinearProgram", "LPError", "LpSolution", "NumericFailure", "Relation", "Sense", "Status",
    "is_feasible", "solve", "available_backends", "backend_name", "use_backend",
]
