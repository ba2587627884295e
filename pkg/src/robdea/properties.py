"""Randomised property suites over generated datasets.

Each check returns a list of violation messages (empty means the property
held). :func:`run_property_suites` drives all of them and is what the
``verify`` subcommand runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .fractional import BisectionConfig, bisect_delta, verify_monotone
from .models import ALL_VARY, ModelKind
from .ranking import TAU_CLASS, classical_score, robust_delta

ORDER_TOL = 1e-7
CLOSED_FORM_TOL = 1e-7
# the exact value is found through a feasibility oracle that accepts 1e-9
# violations in scaled units, which shifts the boundary by up to ~1e-7
EXACT_FORM_TOL = 1e-6
CHAIN_TOL = 1e-7
UNITS_TOL = 1e-7


def random_dataset(rng: np.random.Generator, max_m: int = 12, max_dim: int = 4,
                   low: float = 1.0, high: float = 100.0) -> Dataset:
    m = int(rng.integers(2, max_m + 1))
    n1 = int(rng.integers(1, max_dim + 1))
    n2 = int(rng.integers(1, max_dim + 1))
    X = rng.uniform(low, high, (m, n1))
    Y = rng.uniform(low, high, (m, n2))
    return Dataset.from_arrays([f"D{k + 1}" for k in range(m)], X, Y)


@dataclass
class Scores:
    """Everything the suites compare, computed once per dataset."""

    super_ccr: np.ndarray  # classical CCR without self
    classical_ccr: np.ndarray  # classical CCR with self
    r_lp: np.ndarray
    r_exact: np.ndarray
    super_bcc: np.ndarray
    r_bcc_lp: np.ndarray
    r_bcc_exact: np.ndarray


def compute_scores(ds: Dataset, config: BisectionConfig = BisectionConfig(), bcc: bool = True) -> Scores:
    idx = range(ds.m)
    ccr, bccm = ModelKind.CCR_CLASSICAL, ModelKind.BCC_CLASSICAL
    nan = np.full(ds.m, np.nan)
    return Scores(
        super_ccr=np.array([classical_score(ds, i, ccr, include_self=False) for i in idx]),
        classical_ccr=np.array([classical_score(ds, i, ccr, include_self=True) for i in idx]),
        r_lp=1.0 + np.array([robust_delta(ds, i, ModelKind.CCR_ROBUST_LP) for i in idx]),
        r_exact=1.0 + np.array([2.0 * bisect_delta(ds, i, ALL_VARY, ModelKind.CCR_ROBUST_EXACT, config).midpoint
                                for i in idx]),
        super_bcc=np.array([classical_score(ds, i, bccm, include_self=False) for i in idx]) if bcc else nan,
        r_bcc_lp=1.0 + np.array([robust_delta(ds, i, ModelKind.BCC_ROBUST_LP) for i in idx]) if bcc else nan,
        r_bcc_exact=1.0 + np.array([2.0 * bisect_delta(ds, i, ALL_VARY, ModelKind.BCC_ROBUST_EXACT, config).midpoint
                                    for i in idx]) if bcc else nan,
    )


def lp_rank_from_score(alpha):
    """Robust LP ranking implied by a classical (super-efficiency) score."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(alpha), 2.0, 2.0 * alpha / (1.0 + alpha))


def exact_rank_from_score(alpha):
    """Exact CCR ranking implied by a classical super-efficiency score."""
    s = np.sqrt(np.asarray(alpha, dtype=float))
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(s), 3.0, 1.0 + 2.0 * (s - 1.0) / (s + 1.0))


def _order_violations(name, a, b, tol=ORDER_TOL):
    """Pairs ordered strictly by ``a`` but not by ``b`` (or tied in one only)."""
    out = []
    m = len(a)
    for i in range(m):
        for j in range(i + 1, m):
            da = 0.0 if np.isinf(a[i]) and np.isinf(a[j]) else a[i] - a[j]
            db = b[i] - b[j]
            tie_a, tie_b = abs(da) <= tol, abs(db) <= tol
            if tie_a != tie_b and max(abs(da), abs(db)) > 10 * tol:
                out.append(f"{name}: tie mismatch for pair ({i}, {j}): {da:.3g} vs {db:.3g}")
            elif not tie_a and not tie_b and np.sign(da) != np.sign(db):
                out.append(f"{name}: order reversed for pair ({i}, {j}): {da:.3g} vs {db:.3g}")
    return out


def check_range_and_classification(ds: Dataset, sc: Scores) -> list[str]:
    out = []
    for i in range(ds.m):
        if not -CHAIN_TOL <= sc.r_lp[i] <= 2 + CHAIN_TOL:
            out.append(f"DMU {i}: LP rank {sc.r_lp[i]} outside [0, 2]")
        if not -1 - CHAIN_TOL <= sc.r_exact[i] <= 3 + CHAIN_TOL:
            out.append(f"DMU {i}: exact rank {sc.r_exact[i]} outside [-1, 3]")
        flags = (sc.r_lp[i] - 1 >= -TAU_CLASS, sc.r_exact[i] - 1 >= -TAU_CLASS,
                 sc.classical_ccr[i] >= 1 - TAU_CLASS)
        if len(set(flags)) != 1:
            out.append(f"DMU {i}: efficiency flags disagree (lp, exact, classical) = {flags}")
        if not np.isnan(sc.r_bcc_lp[i]):
            if not -CHAIN_TOL <= sc.r_bcc_lp[i] <= 2 + CHAIN_TOL:
                out.append(f"DMU {i}: BCC LP rank {sc.r_bcc_lp[i]} outside [0, 2]")
            if not -1 - CHAIN_TOL <= sc.r_bcc_exact[i] <= 3 + CHAIN_TOL:
                out.append(f"DMU {i}: BCC exact rank {sc.r_bcc_exact[i]} outside [-1, 3]")
            if (sc.r_bcc_lp[i] >= 1 - TAU_CLASS) != (sc.r_bcc_exact[i] >= 1 - TAU_CLASS):
                out.append(f"DMU {i}: BCC LP and exact disagree on efficiency")
    return out


def check_order_preservation(ds: Dataset, sc: Scores) -> list[str]:
    out = _order_violations("CCR LP vs classical", sc.super_ccr, sc.r_lp)
    out += _order_violations("CCR exact vs classical", sc.super_ccr, sc.r_exact)
    diff = np.abs(sc.r_lp - lp_rank_from_score(sc.super_ccr))
    out += [f"DMU {i}: LP rank off closed form by {diff[i]:.3g}" for i in np.flatnonzero(diff > CLOSED_FORM_TOL)]
    diff = np.abs(sc.r_exact - exact_rank_from_score(sc.super_ccr))
    out += [f"DMU {i}: exact rank off closed form by {diff[i]:.3g}" for i in np.flatnonzero(diff > EXACT_FORM_TOL)]
    if not np.isnan(sc.r_bcc_lp).any():
        out += _order_violations("BCC LP vs classical", sc.super_bcc, sc.r_bcc_lp)
        diff = np.abs(sc.r_bcc_lp - lp_rank_from_score(sc.super_bcc))
        out += [f"DMU {i}: BCC LP rank off closed form by {diff[i]:.3g}"
                for i in np.flatnonzero(diff > CLOSED_FORM_TOL)]
    return out


def check_bcc_exact_order(ds: Dataset, sc: Scores) -> list[str]:
    """Ordering by the exact BCC model against the classical BCC score.

    This does not hold in general: the free intercept enters the test row and
    the peer rows with different delta factors, so the exact value depends on
    more than the classical score. Kept as its own suite so the failures stay
    visible without masking the properties that do hold.
    """
    if np.isnan(sc.r_bcc_exact).any():
        return []
    return _order_violations("BCC exact vs classical", sc.super_bcc, sc.r_bcc_exact)


def check_inequality_chain(ds: Dataset, sc: Scores) -> list[str]:
    """Classical <= LP <= exact for efficient units, exact <= LP and classical <= LP otherwise.

    For efficient units the self-excluded classical score is clamped to 1
    (an interpretation: that score may exceed 1 where the chain assumes 1).
    """
    out = []
    bound = 3 - 2 * math.sqrt(2)
    for i in range(ds.m):
        c, lp, ex = sc.super_ccr[i], sc.r_lp[i], sc.r_exact[i]
        if lp - 1 >= -TAU_CLASS:
            if not (min(c, 1.0) <= lp + CHAIN_TOL and lp <= ex + CHAIN_TOL):
                out.append(f"DMU {i} (efficient): chain {min(c, 1.0)} <= {lp} <= {ex} fails")
        else:
            if not (ex <= lp + CHAIN_TOL and c <= lp + CHAIN_TOL):
                out.append(f"DMU {i} (inefficient): exact {ex}, LP {lp}, classical {c}")
            if ex >= bound and not c <= ex + CHAIN_TOL:
                out.append(f"DMU {i} (inefficient): classical {c} above exact {ex}")
    return out


def check_units_invariance(ds: Dataset, sc: Scores, rng: np.random.Generator) -> list[str]:
    cx = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), ds.input_dim))
    cy = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), ds.output_dim))
    scaled = ds.replace_data(ds.X * cx, ds.Y * cy)
    r = 1.0 + np.array([robust_delta(scaled, i, ModelKind.CCR_ROBUST_LP) for i in range(ds.m)])
    diff = np.abs(r - sc.r_lp)
    return [f"DMU {i}: LP rank moved by {diff[i]:.3g} under column rescaling"
            for i in np.flatnonzero(diff > UNITS_TOL)]


def check_bisection_monotone(ds: Dataset, sc: Scores, rng: np.random.Generator) -> list[str]:
    out = []
    for i in range(ds.m):
        half = 0.5 * (sc.r_exact[i] - 1.0)
        pts = set(np.round(rng.uniform(-0.99, 0.99, 8), 12))
        pts |= {min(max(half - 1e-6, -1.0), 1.0), min(max(half + 1e-6, -1.0), 1.0)}
        grid = sorted(pts)
        if not verify_monotone(ds, i, ALL_VARY, ModelKind.CCR_ROBUST_EXACT, grid):
            out.append(f"DMU {i}: CCR feasibility not monotone on {grid}")
        if not verify_monotone(ds, i, ALL_VARY, ModelKind.BCC_ROBUST_EXACT, grid):
            out.append(f"DMU {i}: BCC feasibility not monotone on {grid}")
    return out


SUITES = ("range_classification", "order_preservation", "bcc_exact_order", "inequality_chain",
          "units_invariance", "bisection_monotone")
# suites whose property is known not to hold; reported but listed apart
KNOWN_FAILING = ("bcc_exact_order",)


@dataclass
class SuiteReport:
    datasets: int = 0
    dmus: int = 0
    seconds: float = 0.0
    violations: dict[str, list[str]] = field(default_factory=lambda: {name: [] for name in SUITES})

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def ok_except(self, names=KNOWN_FAILING) -> bool:
        return not any(v for k, v in self.violations.items() if k not in names)

    def lines(self) -> list[str]:
        return [f"{'PASS' if not v else 'FAIL'} {name}: {len(v)} violations"
                for name, v in self.violations.items()]


def run_property_suites(n_datasets: int = 200, seed: int = 0, max_m: int = 12, max_dim: int = 4,
                        config: BisectionConfig = BisectionConfig()) -> SuiteReport:
    rng = np.random.default_rng(seed)
    report = SuiteReport()
    start = time.perf_counter()
    for k in range(n_datasets):
        ds = random_dataset(rng, max_m, max_dim)
        sc = compute_scores(ds, config)
        tag = f"dataset {k}"
        found = {
            "range_classification": check_range_and_classification(ds, sc),
            "order_preservation": check_order_preservation(ds, sc),
            "bcc_exact_order": check_bcc_exact_order(ds, sc),
            "inequality_chain": check_inequality_chain(ds, sc),
            "units_invariance": check_units_invariance(ds, sc, rng),
            "bisection_monotone": check_bisection_monotone(ds, sc, rng),
        }
        for name, msgs in found.items():
            report.violations[name] += [f"{tag}: {msg}" for msg in msgs]
        report.datasets += 1
        report.dmus += ds.m
    report.seconds = time.perf_counter() - start
    return report
