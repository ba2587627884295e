"""Exact robust models by bisection on delta over LP feasibility checks.

Feasibility of the fixed-delta system is monotone in delta (it only loses
points as delta grows), so the supremum of feasible delta is found by
halving a bracket whose lower end is feasible and upper end is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dataset import Dataset
from .lp import is_feasible
from .models import ALL_VARY, ModelKind, PerturbationMask, feasibility_system


class BracketError(RuntimeError):
    """The bisection bracket does not straddle the feasibility boundary."""


@dataclass(frozen=True)
class BisectionConfig:
    tolerance: float = 1e-9
    max_iterations: int = 100
    lower_bracket: float = -1.0
    upper_bracket: float = 1.0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.lower_bracket < self.upper_bracket:
            raise ValueError("lower bracket must be below upper bracket")
        if not (-1.0 <= self.lower_bracket and self.upper_bracket <= 1.0):
            raise ValueError("brackets must lie in [-1, 1]")
        needed = math.ceil(math.log2((self.upper_bracket - self.lower_bracket) / self.tolerance))
        if self.max_iterations < needed:
            raise ValueError(f"max_iterations={self.max_iterations} cannot reach tolerance; need {needed}")


@dataclass(frozen=True)
class Bracket:
    feasible: float
    infeasible: float
    iterations: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.feasible + self.infeasible)


def _check_model(model) -> ModelKind:
    model = ModelKind(model)
    if not model.is_exact:
        raise ValueError(f"bisection applies to exact robust models, not {model.value}")
    return model


def feasible_at(dataset: Dataset, test_index: int, mask: PerturbationMask, model: ModelKind,
                delta: float) -> bool:
    return is_feasible(feasibility_system(dataset, test_index, model, mask, delta))


def bisect_delta(dataset: Dataset, test_index: int, mask: PerturbationMask = ALL_VARY,
                 model: ModelKind = ModelKind.CCR_ROBUST_EXACT,
                 config: BisectionConfig = BisectionConfig()) -> Bracket:
    """Shrink ``[lower, upper]`` around the supremum of feasible delta."""
    model = _check_model(model)
    lo, hi = config.lower_bracket, config.upper_bracket
    if not feasible_at(dataset, test_index, mask, model, lo):
        raise BracketError(f"system infeasible at the lower bracket delta={lo}")
    if feasible_at(dataset, test_index, mask, model, hi):
        raise BracketError(f"system feasible at the upper bracket delta={hi}")
    it = 0
    while hi - lo > config.tolerance and it < config.max_iterations:
        mid = 0.5 * (lo + hi)
        if feasible_at(dataset, test_index, mask, model, mid):
            lo = mid
        else:
            hi = mid
        it += 1
    return Bracket(lo, hi, it)


def solve_exact_delta(dataset: Dataset, test_index: int, mask: PerturbationMask = ALL_VARY,
                      model: ModelKind = ModelKind.CCR_ROBUST_EXACT,
                      config: BisectionConfig = BisectionConfig()) -> float:
    """Twice the bracket midpoint; the ranking is ``1 + delta*``, within ``[-1, 3]``."""
    delta_star = 2.0 * bisect_delta(dataset, test_index, mask, model, config).midpoint
    if not -2.0 <= delta_star <= 2.0:
        raise BracketError(f"exact delta* = {delta_star} outside [-2, 2]")
    return delta_star


def verify_monotone(dataset: Dataset, test_index: int, mask: PerturbationMask,
                    model: ModelKind, grid: Sequence[float]) -> bool:
    """True iff feasibility over the ascending grid reads true...true, false...false."""
    model = _check_model(model)
    seen_infeasible = False
    for delta in grid:
        ok = feasible_at(dataset, test_index, mask, model, delta)
        if ok and seen_infeasible:
            return False
        seen_infeasible = seen_infeasible or not ok
    return True


def feasibility_profile(dataset: Dataset, test_index: int, mask: PerturbationMask,
                        model: ModelKind, grid: Sequence[float]) -> list[bool]:
    model = _check_model(model)
    return [feasible_at(dataset, test_index, mask, model, d) for d in grid]
