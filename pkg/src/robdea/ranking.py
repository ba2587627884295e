"""Per-DMU rankings ``r = 1 + delta*``, interval ranges and ordering."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .dataset import Dataset, IntervalDataset
from .fractional import BisectionConfig, BracketError, feasible_at, solve_exact_delta
from .lp import LPError, Status, solve
from .models import (
    ALL_VARY,
    ModelError,
    ModelKind,
    PerturbationMask,
    build_bcc_classical,
    build_bcc_robust_lp,
    build_ccr_classical,
    build_robust_lp,
    scale_factor,
)

TAU_CLASS = 1e-7
TIE_TOLERANCE = 1e-9
# slack on the [0, 2] / [-1, 3] range checks for solver round-off
_RANGE_SLACK = 1e-9


class RankingError(RuntimeError):
    pass


@dataclass(frozen=True)
class RankingConfig:
    bisection: BisectionConfig = field(default_factory=BisectionConfig)
    include_self_classical: bool = True
    interval_model: ModelKind = ModelKind.CCR_ROBUST_LP


DEFAULT_CONFIG = RankingConfig()


@dataclass(frozen=True)
class RankingResult:
    dmu_id: str
    model: ModelKind
    delta_star: float
    r: float
    classical_score: float
    efficient: bool
    mask: PerturbationMask = ALL_VARY

    def __post_init__(self):
        if self.r != 1.0 + self.delta_star:
            raise ValueError("r must equal 1 + delta_star")

    def as_dict(self) -> dict:
        return {
            "id": self.dmu_id,
            "model": self.model.value,
            "delta_star": self.delta_star,
            "r": self.r,
            "classical": self.classical_score,
            "efficient": self.efficient,
        }


@dataclass(frozen=True)
class EfficiencyRange:
    dmu_id: str
    r_lower: float
    r_upper: float
    always_efficient: bool
    never_efficient: bool

    def as_dict(self) -> dict:
        return {
            "id": self.dmu_id,
            "r_lower": self.r_lower,
            "r_upper": self.r_upper,
            "always_efficient": self.always_efficient,
            "never_efficient": self.never_efficient,
        }


@dataclass(frozen=True)
class RankingFailure:
    dmu_id: str
    error: Exception


class BatchRanking(Sequence):
    """Results of :func:`rank_all` in dataset order, plus any per-DMU failures."""

    def __init__(self, results, failures=()):
        self.results = list(results)
        self.failures = list(failures)

    def __getitem__(self, i):
        return self.results[i]

    def __len__(self):
        return len(self.results)

    def __repr__(self):
        return f"BatchRanking({len(self.results)} results, {len(self.failures)} failures)"


def classical_score(dataset: Dataset, test_index: int, model: ModelKind = ModelKind.CCR_CLASSICAL,
                    include_self: bool = True) -> float:
    """Optimum of the classical CCR or BCC model (``inf`` if unbounded without self)."""
    builder = build_bcc_classical if ModelKind(model).is_bcc else build_ccr_classical
    sol = solve(builder(dataset, test_index, include_self))
    if sol.status is Status.UNBOUNDED:
        return float("inf")
    if not sol.optimal:
        raise RankingError(f"classical model for DMU {dataset.ids[test_index]!r} is {sol.status.value}")
    return sol.objective_value


def robust_delta(dataset: Dataset, test_index: int, model: ModelKind, mask: PerturbationMask = ALL_VARY,
                 config: RankingConfig = DEFAULT_CONFIG) -> float:
    """delta* of a robust model, already rescaled for the mask."""
    model = ModelKind(model)
    if model.is_bcc and not mask.is_all_vary:
        raise ModelError("the BCC robust models support only the all-vary mask")
    if model.is_exact:
        return solve_exact_delta(dataset, test_index, mask, model, config.bisection)
    if model is ModelKind.CCR_ROBUST_LP:
        lp, factor = build_robust_lp(dataset, test_index, mask), scale_factor(mask)
    elif model is ModelKind.BCC_ROBUST_LP:
        lp, factor = build_bcc_robust_lp(dataset, test_index), 1.0
    else:
        raise ModelError(f"{model.value} is not a robust model")
    sol = solve(lp)
    if not sol.optimal:
        raise RankingError(f"robust LP for DMU {dataset.ids[test_index]!r} is {sol.status.value}")
    return factor * sol.objective_value


def rank_one(dataset: Dataset, test_index: int, model: ModelKind = ModelKind.CCR_ROBUST_LP,
             mask: PerturbationMask = ALL_VARY, config: RankingConfig = DEFAULT_CONFIG) -> RankingResult:
    model = ModelKind(model)
    test_index = dataset.check_index(test_index)
    score = classical_score(dataset, test_index, model.classical, config.include_self_classical)
    if model.is_classical:
        delta_star = score - 1.0
    else:
        mask.require_any()
        delta_star = robust_delta(dataset, test_index, model, mask, config)
        lo, hi = (-1.0, 1.0) if (model.is_robust_lp and mask.is_all_vary) else (-2.0, 2.0)
        if not lo - _RANGE_SLACK <= delta_star <= hi + _RANGE_SLACK:
            raise RankingError(f"delta* = {delta_star} for {dataset.ids[test_index]!r} outside [{lo}, {hi}]")
    efficient = delta_star >= -TAU_CLASS
    if model.is_exact and abs(delta_star) <= TAU_CLASS:
        # the supremum can be 0 without being attained (e.g. an output tied
        # with the best peer under BCC); settle it at delta = 0 directly
        efficient = feasible_at(dataset, test_index, mask, model, 0.0)
    return RankingResult(
        dmu_id=dataset.ids[test_index],
        model=model,
        delta_star=delta_star,
        r=1.0 + delta_star,
        classical_score=score,
        efficient=efficient,
        mask=mask,
    )


def rank_all(dataset: Dataset, model: ModelKind = ModelKind.CCR_ROBUST_LP, mask: PerturbationMask = ALL_VARY,
             config: RankingConfig = DEFAULT_CONFIG) -> BatchRanking:
    """Rank every DMU; a failing DMU is recorded and skipped unless all fail."""
    results, failures = [], []
    for i, dmu_id in enumerate(dataset.ids):
        try:
            results.append(rank_one(dataset, i, model, mask, config))
        except (LPError, RankingError, BracketError) as exc:
            failures.append(RankingFailure(dmu_id, exc))
    if not results:
        detail = "; ".join(f"{f.dmu_id}: {f.error}" for f in failures)
        raise RankingError(f"every DMU failed to rank ({detail})")
    return BatchRanking(results, failures)


def rank_interval(interval_dataset: IntervalDataset, test_index: int, model: ModelKind | None = None,
                  config: RankingConfig = DEFAULT_CONFIG) -> EfficiencyRange:
    """Worst-case and best-case rankings of one DMU over interval data."""
    model = ModelKind(model if model is not None else config.interval_model)
    if model.is_classical:
        raise ModelError("interval ranges need a robust model")
    test_index = interval_dataset.lower.check_index(test_index)
    best = rank_one(interval_dataset.best_case(test_index), test_index, model, ALL_VARY, config)
    worst = rank_one(interval_dataset.worst_case(test_index), test_index, model, ALL_VARY, config)
    if worst.r > best.r + _RANGE_SLACK:
        raise RankingError(f"worst case {worst.r} above best case {best.r} for {best.dmu_id!r}")
    return EfficiencyRange(
        dmu_id=best.dmu_id,
        r_lower=worst.r,
        r_upper=max(best.r, worst.r),
        always_efficient=worst.efficient,
        never_efficient=not best.efficient,
    )


def rank_interval_all(interval_dataset: IntervalDataset, model: ModelKind | None = None,
                      config: RankingConfig = DEFAULT_CONFIG) -> list[EfficiencyRange]:
    return [rank_interval(interval_dataset, i, model, config) for i in range(interval_dataset.m)]


def sorted_order(results, tie_tolerance: float = TIE_TOLERANCE) -> list[str]:
    """DMU ids by descending r.

    Values within ``tie_tolerance`` of the first member of their run count as
    tied and keep their input order.
    """
    results = list(results)
    if len({res.model for res in results}) > 1:
        raise ValueError("cannot order results from different model kinds")
    ranked = sorted(enumerate(results), key=lambda p: -p[1].r)
    order, run = [], []
    for pos, res in ranked:
        if run and run[0][1].r - res.r > tie_tolerance:
            order += sorted(run)
            run = []
        run.append((pos, res))
    order += sorted(run)
    return [res.dmu_id for _, res in order]
