"""LP and fixed-delta feasibility builders for the classical and robust DEA models.

Variable layout is ``[u (output weights), v (input weights), v0?, delta?]``.
Robust models always drop the test DMU from its peer block; classical models
keep it by default so efficient units score exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .dataset import Dataset
from .lp import ConstraintSystem, LinearProgram, Relation, Sense

LE, GE = Relation.LE, Relation.GE


class ModelError(ValueError):
    pass


class ModelKind(str, Enum):
    CCR_CLASSICAL = "ccr"
    CCR_ROBUST_LP = "robust-lp"
    CCR_ROBUST_EXACT = "robust-exact"
    BCC_CLASSICAL = "bcc"
    BCC_ROBUST_LP = "bcc-robust-lp"
    BCC_ROBUST_EXACT = "bcc-robust-exact"

    @property
    def is_bcc(self) -> bool:
        return self in (ModelKind.BCC_CLASSICAL, ModelKind.BCC_ROBUST_LP, ModelKind.BCC_ROBUST_EXACT)

    @property
    def is_classical(self) -> bool:
        return self in (ModelKind.CCR_CLASSICAL, ModelKind.BCC_CLASSICAL)

    @property
    def is_exact(self) -> bool:
        return self in (ModelKind.CCR_ROBUST_EXACT, ModelKind.BCC_ROBUST_EXACT)

    @property
    def is_robust_lp(self) -> bool:
        return self in (ModelKind.CCR_ROBUST_LP, ModelKind.BCC_ROBUST_LP)

    @property
    def classical(self) -> "ModelKind":
        return ModelKind.BCC_CLASSICAL if self.is_bcc else ModelKind.CCR_CLASSICAL


FIX_NAMES = {
    "inputs": "vary_test_inputs",
    "outputs": "vary_test_outputs",
    "peers-inputs": "vary_peer_inputs",
    "peers-outputs": "vary_peer_outputs",
}


@dataclass(frozen=True)
class PerturbationMask:
    """Which data groups may move in the robust models."""

    vary_test_inputs: bool = True
    vary_test_outputs: bool = True
    vary_peer_inputs: bool = True
    vary_peer_outputs: bool = True

    @classmethod
    def fixing(cls, names: Iterable[str]) -> "PerturbationMask":
        """Mask with the named groups held fixed (``inputs``, ``peers-outputs``, ...)."""
        flags = {}
        for name in names:
            if name not in FIX_NAMES:
                raise ModelError(f"unknown data group {name!r}; expected one of {sorted(FIX_NAMES)}")
            flags[FIX_NAMES[name]] = False
        return cls(**flags)

    @property
    def is_all_vary(self) -> bool:
        return self.vary_test_inputs and self.vary_test_outputs and self.vary_peer_inputs and self.vary_peer_outputs

    @property
    def any_vary(self) -> bool:
        return self.vary_test_inputs or self.vary_test_outputs or self.vary_peer_inputs or self.vary_peer_outputs

    @property
    def output_side_steps(self) -> int:
        # factors (1 - delta) that end up on the test-output row after substitution
        return int(self.vary_test_outputs) + int(self.vary_peer_inputs)

    @property
    def input_side_steps(self) -> int:
        return int(self.vary_test_inputs) + int(self.vary_peer_outputs)

    @property
    def fixed_names(self) -> list[str]:
        return [name for name, attr in FIX_NAMES.items() if not getattr(self, attr)]

    def require_any(self):
        if not self.any_vary:
            raise ModelError("perturbation mask fixes every data group")


ALL_VARY = PerturbationMask()


def scale_factor(mask: PerturbationMask) -> float:
    """Multiplier turning the robust LP optimum into the reported delta*."""
    return 1.0 if mask.is_all_vary else 2.0


def _peers(dataset: Dataset, test_index: int, include_self: bool):
    test_index = dataset.check_index(test_index)
    if include_self:
        return dataset.X, dataset.Y
    keep = np.arange(dataset.m) != test_index
    return dataset.X[keep], dataset.Y[keep]


def _feas_codes(n_peers: int) -> np.ndarray:
    # >= for the test outputs, <= for the test inputs and every peer row
    codes = np.zeros(2 + n_peers, dtype=np.int8)
    codes[0] = 1
    return codes


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not -1.0 <= delta <= 1.0:
        raise ModelError(f"delta must lie in [-1, 1], got {delta}")
    return delta


def build_ccr_classical(dataset: Dataset, test_index: int, include_self: bool = True) -> LinearProgram:
    """``max y0'u  s.t.  x0'v <= 1,  Y u - X v <= 0,  u, v >= 0``."""
    Xp, Yp = _peers(dataset, test_index, include_self)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    A = np.zeros((1 + Xp.shape[0], n2 + n1))
    A[0, n2:] = x0
    A[1:, :n2] = Yp
    A[1:, n2:] = -Xp
    b = np.zeros(A.shape[0])
    b[0] = 1.0
    c = np.concatenate([y0, np.zeros(n1)])
    return LinearProgram.from_arrays(c, A, [LE] * A.shape[0], b, sense=Sense.MAXIMIZE)


def build_bcc_classical(dataset: Dataset, test_index: int, include_self: bool = True) -> LinearProgram:
    """CCR plus a free intercept ``v0``: ``max y0'u - v0  s.t.  Y u - X v - v0 <= 0``."""
    Xp, Yp = _peers(dataset, test_index, include_self)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    n = n2 + n1 + 1
    A = np.zeros((1 + Xp.shape[0], n))
    A[0, n2:n2 + n1] = x0
    A[1:, :n2] = Yp
    A[1:, n2:n2 + n1] = -Xp
    A[1:, -1] = -1.0
    b = np.zeros(A.shape[0])
    b[0] = 1.0
    c = np.concatenate([y0, np.zeros(n1), [-1.0]])
    lower = np.zeros(n)
    lower[-1] = -np.inf
    return LinearProgram.from_arrays(c, A, [LE] * A.shape[0], b, lower=lower, sense=Sense.MAXIMIZE)


def build_robust_lp(dataset: Dataset, test_index: int, mask: PerturbationMask = ALL_VARY) -> LinearProgram:
    """Linearised robust CCR model over ``(u~, v~, delta)``, maximising ``delta``.

    All-vary mask::

        y0'u~ >= 1 + delta,  x0'v~ <= 1 - delta,  Y u~ - X v~ <= 0

    A partial mask keeps one linearisation step per varying group: the
    output row carries ``(#varying test outputs + peer inputs) * delta`` and
    the input row ``(#varying test inputs + peer outputs) * delta``; delta is
    capped at 1 and the optimum is reported doubled (see :func:`scale_factor`).
    """
    mask.require_any()
    Xp, Yp = _peers(dataset, test_index, include_self=False)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    n = n2 + n1 + 1
    if mask.is_all_vary:
        out_coef, in_coef, delta_ub = 1.0, 1.0, np.inf
    else:
        out_coef, in_coef, delta_ub = float(mask.output_side_steps), float(mask.input_side_steps), 1.0
    A = np.zeros((2 + Xp.shape[0], n))
    A[0, :n2] = y0
    A[0, -1] = -out_coef
    A[1, n2:n2 + n1] = x0
    A[1, -1] = in_coef
    A[2:, :n2] = Yp
    A[2:, n2:n2 + n1] = -Xp
    b = np.zeros(A.shape[0])
    b[:2] = 1.0
    rels = [GE, LE] + [LE] * Xp.shape[0]
    c = np.zeros(n)
    c[-1] = 1.0
    lower = np.zeros(n)
    lower[-1] = -np.inf
    upper = np.full(n, np.inf)
    upper[-1] = delta_ub
    return LinearProgram.from_arrays(c, A, rels, b, lower=lower, upper=upper, sense=Sense.MAXIMIZE)


def build_bcc_robust_lp(dataset: Dataset, test_index: int) -> LinearProgram:
    """``max delta  s.t.  y0'u~ - v0~ >= 1 + delta,  x0'v~ <= 1 - delta,  Y u~ - X v~ - v0~ <= 0``."""
    Xp, Yp = _peers(dataset, test_index, include_self=False)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    n = n2 + n1 + 2
    A = np.zeros((2 + Xp.shape[0], n))
    A[0, :n2] = y0
    A[0, -2] = -1.0
    A[0, -1] = -1.0
    A[1, n2:n2 + n1] = x0
    A[1, -1] = 1.0
    A[2:, :n2] = Yp
    A[2:, n2:n2 + n1] = -Xp
    A[2:, -2] = -1.0
    b = np.zeros(A.shape[0])
    b[:2] = 1.0
    c = np.zeros(n)
    c[-1] = 1.0
    lower = np.zeros(n)
    lower[-2:] = -np.inf
    return LinearProgram.from_arrays(c, A, [GE, LE] + [LE] * Xp.shape[0], b, lower=lower,
                                     sense=Sense.MAXIMIZE)


def build_robust_feasibility(dataset: Dataset, test_index: int, mask: PerturbationMask = ALL_VARY,
                             delta: float = 0.0) -> ConstraintSystem:
    """Exact robust CCR system at a fixed ``delta`` over ``(u, v) >= 0``::

        (1-delta) y0'u >= 1,  (1+delta) x0'v <= 1,  (1+delta) Y u - (1-delta) X v <= 0

    with each factor kept only for groups the mask lets vary.
    """
    mask.require_any()
    delta = _check_delta(delta)
    Xp, Yp = _peers(dataset, test_index, include_self=False)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    lo, hi = 1.0 - delta, 1.0 + delta
    A = np.zeros((2 + Xp.shape[0], n2 + n1))
    A[0, :n2] = y0 * lo if mask.vary_test_outputs else y0
    A[1, n2:] = x0 * hi if mask.vary_test_inputs else x0
    A[2:, :n2] = Yp * hi if mask.vary_peer_outputs else Yp
    A[2:, n2:] = -(Xp * lo if mask.vary_peer_inputs else Xp)
    b = np.zeros(A.shape[0])
    b[:2] = 1.0
    n = A.shape[1]
    return ConstraintSystem._trusted(A, _feas_codes(Xp.shape[0]), b, np.zeros(n), np.full(n, np.inf))


def build_bcc_robust_feasibility(dataset: Dataset, test_index: int, delta: float) -> ConstraintSystem:
    """``(1-delta) y0'u - v0 >= 1, (1+delta) x0'v <= 1, (1+delta) Y u - (1-delta) X v - v0 <= 0``, v0 free."""
    delta = _check_delta(delta)
    Xp, Yp = _peers(dataset, test_index, include_self=False)
    x0, y0 = dataset.X[test_index], dataset.Y[test_index]
    n1, n2 = dataset.input_dim, dataset.output_dim
    n = n2 + n1 + 1
    A = np.zeros((2 + Xp.shape[0], n))
    A[0, :n2] = (1.0 - delta) * y0
    A[0, -1] = -1.0
    A[1, n2:n2 + n1] = (1.0 + delta) * x0
    A[2:, :n2] = (1.0 + delta) * Yp
    A[2:, n2:n2 + n1] = -(1.0 - delta) * Xp
    A[2:, -1] = -1.0
    b = np.zeros(A.shape[0])
    b[:2] = 1.0
    lower = np.zeros(n)
    lower[-1] = -np.inf
    return ConstraintSystem._trusted(A, _feas_codes(Xp.shape[0]), b, lower, np.full(n, np.inf))


def feasibility_system(dataset: Dataset, test_index: int, model: ModelKind,
                       mask: PerturbationMask, delta: float) -> ConstraintSystem:
    """Fixed-delta system behind an exact robust model."""
    model = ModelKind(model)
    if model is ModelKind.CCR_ROBUST_EXACT:
        return build_robust_feasibility(dataset, test_index, mask, delta)
    if model is ModelKind.BCC_ROBUST_EXACT:
        if not mask.is_all_vary:
            raise ModelError("the BCC robust models support only the all-vary mask")
        return build_bcc_robust_feasibility(dataset, test_index, delta)
    raise ModelError(f"{model.value} has no fixed-delta feasibility system")


def efficiency_system(dataset: Dataset, test_index: int) -> ConstraintSystem:
    """``y0'u >= 1, x0'v <= 1, Y u - X v <= 0`` with the test DMU left out of the peers."""
    return build_robust_feasibility(dataset, test_index, ALL_VARY, 0.0)
