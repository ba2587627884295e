"""Monte-Carlo checks that sampled data in the relative delta-box keep a DMU's classification.

Every trial draws its own generator from ``(seed, trial counter)``, so a
report does not depend on the order in which trials are evaluated and any
single violating scenario can be regenerated from its recorded seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .lp import LPError, is_feasible
from .models import ALL_VARY, PerturbationMask, efficiency_system

SCHEMES = ("uniform", "vertex")


class PerturbationError(RuntimeError):
    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


@dataclass(frozen=True, eq=False)
class PerturbationSample:
    scenario: Dataset
    delta: float
    seed: int


@dataclass(frozen=True)
class RetentionReport:
    dmu_id: str
    delta: float
    trials: int
    retained: int
    violations: tuple[int, ...]
    nominal_efficient: bool

    @property
    def fully_retained(self) -> bool:
        return self.retained == self.trials


def trial_seed(seed: int, counter: int) -> int:
    """64-bit seed for trial ``counter`` of a run seeded with ``seed``."""
    state = np.random.SeedSequence([int(seed), int(counter)]).generate_state(1, np.uint64)
    return int(state[0])


def _factors(rng, delta, shape, scheme):
    if scheme == "uniform":
        return rng.uniform(1.0 - delta, 1.0 + delta, shape)
    if scheme == "vertex":
        return 1.0 + delta * (2.0 * rng.integers(0, 2, shape) - 1.0)
    raise ValueError(f"unknown sampling scheme {scheme!r}; expected one of {SCHEMES}")


def sample_neighborhood(dataset: Dataset, delta: float, mask: PerturbationMask = ALL_VARY, seed: int = 0,
                        *, test_index: int | None = None, scheme: str = "uniform") -> PerturbationSample:
    """Multiply every varying datum by an independent factor in ``[1 - delta, 1 + delta]``.

    ``scheme="uniform"`` draws factors uniformly from the interval;
    ``scheme="vertex"`` draws only the endpoints, i.e. corners of the box.
    A partial mask needs ``test_index`` to tell the test row from the peers.
    """
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    rng = np.random.default_rng(seed)
    fx = _factors(rng, delta, dataset.X.shape, scheme)
    fy = _factors(rng, delta, dataset.Y.shape, scheme)
    if not mask.is_all_vary:
        if test_index is None:
            raise ValueError("a partial mask needs the test DMU index")
        test_index = dataset.check_index(test_index)
        peers = np.arange(dataset.m) != test_index
        if not mask.vary_test_inputs:
            fx[test_index] = 1.0
        if not mask.vary_test_outputs:
            fy[test_index] = 1.0
        if not mask.vary_peer_inputs:
            fx[peers] = 1.0
        if not mask.vary_peer_outputs:
            fy[peers] = 1.0
    scenario = dataset.replace_data(dataset.X * fx, dataset.Y * fy)
    return PerturbationSample(scenario, delta, int(seed))


def is_efficient(dataset: Dataset, test_index: int) -> bool:
    """Efficiency against the other DMUs: ``y0'u >= 1, x0'v <= 1, Y u <= X v`` solvable."""
    return is_feasible(efficiency_system(dataset, test_index))


def retention_test(dataset: Dataset, test_index: int, delta: float, trials: int = 1000, seed: int = 0,
                   mask: PerturbationMask = ALL_VARY, *, scheme: str = "vertex") -> RetentionReport:
    """Count sampled scenarios in which the DMU keeps its nominal (in)efficiency."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    test_index = dataset.check_index(test_index)
    nominal = is_efficient(dataset, test_index)
    violations = []
    for t in range(trials):
        s = trial_seed(seed, t)
        sample = sample_neighborhood(dataset, delta, mask, s, test_index=test_index, scheme=scheme)
        try:
            same = is_efficient(sample.scenario, test_index) == nominal
        except LPError as exc:
            raise PerturbationError(f"trial {t} (seed {s}) failed: {exc}", seed=s) from exc
        if not same:
            violations.append(s)
    return RetentionReport(
        dmu_id=dataset.ids[test_index],
        delta=float(delta),
        trials=trials,
        retained=trials - len(violations),
        violations=tuple(violations),
        nominal_efficient=nominal,
    )


def empirical_radius(dataset: Dataset, test_index: int, trials_per_level: int, levels: Sequence[float],
                     seed: int = 0, mask: PerturbationMask = ALL_VARY, *, scheme: str = "vertex") -> float:
    """Largest level of the ascending grid reached before the first observed flip.

    Returns 0.0 when even the first level shows a flip.
    """
    levels = [float(v) for v in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly ascending")
    if levels and not (0.0 <= levels[0] and levels[-1] < 1.0):
        raise ValueError("levels must lie in [0, 1)")
    radius = 0.0
    for k, level in enumerate(levels):
        report = retention_test(dataset, test_index, level, trials_per_level, trial_seed(seed, k), mask,
                                scheme=scheme)
        if not report.fully_retained:
            break
        radius = level
    return radius
