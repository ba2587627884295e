"""Dense two-phase primal simplex.

Problems are converted to ``min c'x, A'x (<=,>=,=) b, x >= 0`` by shifting,
reflecting or splitting variables, equilibrated with power-of-two row and
column factors, and handed to the tableau kernel (compiled when available).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from ._pytableau import ITERATION_LIMIT, NUMERIC_FAILURE, UNBOUNDED

TAU_FEAS = 1e-9
TAU_OPT = 1e-9
TAU_PIVOT = 1e-10


class LPError(Exception):
    """Base class for solver errors."""


class InvalidInputError(LPError, ValueError):
    """Malformed LP: dimension mismatch, non-finite data, crossed bounds."""


class NumericFailure(LPError, ArithmeticError):
    """The simplex could not produce a trustworthy answer."""


class Sense(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Relation(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


# integer codes used internally: 0 is <=, 1 is >=, 2 is =
_LE, _GE, _EQ = 0, 1, 2
_CODE = {Relation.LE: _LE, Relation.GE: _GE, Relation.EQ: _EQ}
_RELATION = (Relation.LE, Relation.GE, Relation.EQ)
_ALIASES = {"<=": Relation.LE, "≤": Relation.LE, ">=": Relation.GE, "≥": Relation.GE,
            "=": Relation.EQ, "==": Relation.EQ}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: Relation
    rhs: float


def _as_relation(rel) -> Relation:
    if isinstance(rel, Relation):
        return rel
    try:
        return _ALIASES[rel]
    except KeyError:
        raise InvalidInputError(f"unknown relation {rel!r}") from None


class ConstraintSystem:
    """Linear constraints ``A x (rel) b`` with variable bounds ``lower <= x <= upper``.

    Bounds default to ``0`` and ``+inf``. The arrays are copied and made
    read-only, so a system can be shared freely.
    """

    __slots__ = ("A", "rhs", "lower", "upper", "codes", "_relations")

    def __init__(self, A, relations, rhs, lower=None, upper=None, n_vars=None):
        A = np.array(A, dtype=float)
        if A.size == 0:
            if n_vars is None:
                raise InvalidInputError("number of variables unknown for an empty system")
            A = A.reshape(0, n_vars)
        if A.ndim != 2:
            raise InvalidInputError("coefficient matrix must be two-dimensional")
        k, n = A.shape
        if n_vars is not None and n != n_vars:
            raise InvalidInputError(f"coefficient rows have length {n}, expected {n_vars}")
        rels = tuple(_as_relation(r) for r in relations)
        b = np.array(rhs, dtype=float).reshape(-1)
        if len(rels) != k or b.shape[0] != k:
            raise InvalidInputError("relations and rhs must have one entry per row")
        lo = np.zeros(n) if lower is None else np.array(lower, dtype=float).reshape(-1)
        hi = np.full(n, np.inf) if upper is None else np.array(upper, dtype=float).reshape(-1)
        if lo.shape[0] != n or hi.shape[0] != n:
            raise InvalidInputError("bounds must have one entry per variable")
        if not (np.isfinite(A).all() and np.isfinite(b).all()):
            raise InvalidInputError("constraint coefficients must be finite")
        if np.isnan(lo).any() or np.isnan(hi).any() or (lo == np.inf).any() or (hi == -np.inf).any():
            raise InvalidInputError("invalid variable bound")
        if (lo > hi).any():
            raise InvalidInputError("lower bound exceeds upper bound")
        codes = np.array([_CODE[r] for r in rels], dtype=np.int8)
        for arr in (A, b, lo, hi, codes):
            arr.setflags(write=False)
        self.A, self.rhs, self.lower, self.upper = A, b, lo, hi
        self.codes, self._relations = codes, rels

    @classmethod
    def _trusted(cls, A, codes, rhs, lower, upper):
        """Skip validation for arrays built internally from validated data."""
        self = cls.__new__(cls)
        for arr in (A, codes, rhs, lower, upper):
            arr.setflags(write=False)
        self.A, self.rhs, self.lower, self.upper = A, rhs, lower, upper
        self.codes, self._relations = codes, None
        return self

    @property
    def relations(self) -> tuple[Relation, ...]:
        if self._relations is None:
            self._relations = tuple(_RELATION[c] for c in self.codes.tolist())
        return self._relations

    @classmethod
    def from_constraints(cls, constraints: Iterable, lower=None, upper=None, n_vars=None):
        rows, rels, rhs = [], [], []
        for con in constraints:
            if isinstance(con, Constraint):
                coeffs, rel, b = con.coeffs, con.relation, con.rhs
            else:
                coeffs, rel, b = con
            rows.append(list(coeffs))
            rels.append(rel)
            rhs.append(b)
        if n_vars is None:
            if rows:
                n_vars = len(rows[0])
            elif lower is not None:
                n_vars = len(lower)
            elif upper is not None:
                n_vars = len(upper)
        if any(len(r) != len(rows[0]) for r in rows):
            raise InvalidInputError("coefficient rows differ in length")
        return cls(rows, rels, rhs, lower, upper, n_vars=n_vars)

    @property
    def n_vars(self) -> int:
        return self.A.shape[1]

    @property
    def constraints(self) -> list[Constraint]:
        return [Constraint(tuple(row.tolist()), rel, float(b))
                for row, rel, b in zip(self.A, self.relations, self.rhs)]

    def residuals(self, x) -> np.ndarray:
        """Signed violation of each row at ``x`` (positive means violated)."""
        ax = self.A @ np.asarray(x, dtype=float)
        diff = ax - self.rhs
        return np.where(self.codes == _LE, diff, np.where(self.codes == _GE, -diff, np.abs(diff)))

    def __repr__(self):
        return f"ConstraintSystem(rows={self.A.shape[0]}, vars={self.n_vars})"


class LinearProgram:
    """Objective plus a :class:`ConstraintSystem`."""

    __slots__ = ("objective", "system", "sense")

    def __init__(self, objective, constraints=(), lower=None, upper=None, sense=Sense.MAXIMIZE):
        c = np.array(objective, dtype=float).reshape(-1)
        if not np.isfinite(c).all():
            raise InvalidInputError("objective coefficients must be finite")
        if isinstance(constraints, ConstraintSystem):
            system = constraints
            if lower is not None or upper is not None:
                system = ConstraintSystem(system.A, system.relations, system.rhs, lower, upper)
        else:
            system = ConstraintSystem.from_constraints(constraints, lower, upper, n_vars=c.shape[0])
        if system.n_vars != c.shape[0]:
            raise InvalidInputError(
                f"objective has {c.shape[0]} coefficients but constraints have {system.n_vars}")
        c.setflags(write=False)
        self.objective = c
        self.system = system
        self.sense = Sense(sense)

    @classmethod
    def from_arrays(cls, objective, A, relations, rhs, lower=None, upper=None, sense=Sense.MAXIMIZE):
        c = np.asarray(objective, dtype=float)
        return cls(c, ConstraintSystem(A, relations, rhs, lower, upper, n_vars=c.shape[0]), sense=sense)

    # names used throughout the docs
    @property
    def objective_sense(self) -> Sense:
        return self.sense

    @property
    def objective_coeffs(self) -> np.ndarray:
        return self.objective

    @property
    def constraints(self) -> list[Constraint]:
        return self.system.constraints

    @property
    def variable_lower_bounds(self) -> np.ndarray:
        return self.system.lower

    @property
    def variable_upper_bounds(self) -> np.ndarray:
        return self.system.upper

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    def evaluate(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))

    def __repr__(self):
        return f"LinearProgram({self.sense.value}, rows={self.system.A.shape[0]}, vars={self.n_vars})"


@dataclass(frozen=True)
class LpSolution:
    status: Status
    objective_value: float | None = None
    variable_values: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _StandardForm:
    """``x = shift + M @ xs`` with ``xs >= 0``; rows ``As xs (rel) bs``.

    A finite lower bound shifts the variable, a finite upper bound alone
    reflects it, and a free variable splits into two columns. Variables with
    both bounds get an extra ``<=`` row for the width.
    """

    def __init__(self, system: ConstraintSystem):
        A, lo, hi = system.A, system.lower, system.upper
        n = A.shape[1]
        self.n = n
        lo_f, hi_f = np.isfinite(lo), np.isfinite(hi)
        if not hi_f.any() and lo_f.all() and not lo.any():
            # already x >= 0
            self.owner, self.sign, self.shift = None, None, None
            self.A, self.b, self.codes = A, system.rhs, system.codes
            return
        free = ~lo_f & ~hi_f
        counts = np.where(free, 2, 1)
        first = np.cumsum(counts) - counts
        owner = np.repeat(np.arange(n), counts)
        sign = np.ones(owner.shape[0])
        sign[first[free] + 1] = -1.0
        sign[first[~lo_f & hi_f]] = -1.0
        shift = np.where(lo_f, lo, np.where(hi_f, hi, 0.0))
        As = A[:, owner] * sign
        bs = system.rhs - A @ shift
        codes = system.codes
        boxed = np.flatnonzero(lo_f & hi_f)
        if boxed.size:
            extra = np.zeros((boxed.size, owner.shape[0]))
            extra[np.arange(boxed.size), first[boxed]] = 1.0
            As = np.vstack([As, extra])
            bs = np.concatenate([bs, hi[boxed] - lo[boxed]])
            codes = np.concatenate([codes, np.zeros(boxed.size, dtype=np.int8)])
        self.owner, self.sign, self.shift = owner, sign, shift
        self.A, self.b, self.codes = As, bs, codes

    def objective(self, c: np.ndarray) -> np.ndarray:
        return c if self.owner is None else c[self.owner] * self.sign

    def recover(self, xs: np.ndarray) -> np.ndarray:
        if self.owner is None:
            return xs.copy()
        return self.shift + np.bincount(self.owner, weights=self.sign * xs, minlength=self.n)


def _refine(T0, b, basis, xb):
    """One step of iterative refinement of the basic values against the original rows.

    Long pivot sequences can leave the tableau's right-hand side far less
    accurate than the basis it describes, notably when free variables split
    into large cancelling halves.
    """
    if not len(basis):
        return xb
    B = T0[:, basis]
    try:
        step = np.linalg.solve(B, b - B @ xb)
    except np.linalg.LinAlgError:
        return xb
    if not np.all(np.isfinite(step)):
        return xb
    return xb + step


def _run(lp_objective, system: ConstraintSystem, minimize: bool, phase1_only: bool,
         tol_feas: float, tol_opt: float, tol_piv: float):
    """Shared driver; returns ``(status, x, iterations)``."""
    sf = _StandardForm(system)
    ns = sf.A.shape[1]
    A = np.ascontiguousarray(sf.A, dtype=float)
    prepared = _kernel.prepare(A, np.ascontiguousarray(sf.b, dtype=float),
                               np.ascontiguousarray(sf.codes, dtype=np.int8), tol_feas)
    if prepared is None:
        return Status.INFEASIBLE, None, 0
    T, basis, art0, keep, row_scale, col_scale, feas_limit = prepared
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    n_art = ncols - art0
    T0 = T[:m].copy()

    max_iter = 50 * (m + ncols) + 1000
    bland_after = 2 * (m + ncols)
    iterations = 0

    if n_art:
        status, it = _kernel.simplex(T, basis, ncols, max_iter, tol_opt, tol_piv, bland_after)
        iterations += it
        if status == ITERATION_LIMIT or status == NUMERIC_FAILURE:
            raise NumericFailure(f"phase 1 stopped with kernel status {status}")
        if -T[m, -1] > feas_limit:
            return Status.INFEASIBLE, None, iterations
        # drive zero-level artificials out; rows with nothing to pivot on are redundant
        for i in np.flatnonzero(basis >= art0):
            row = np.abs(T[i, :art0])
            j = int(np.argmax(row)) if art0 else -1
            if j >= 0 and row[j] > tol_piv:
                _kernel.pivot(T, i, j)
                basis[i] = j

    if not phase1_only:
        cost = np.zeros(ncols + 1)
        c = sf.objective(np.asarray(lp_objective, dtype=float))
        if not minimize:
            c = -c
        cost[:ns] = c * col_scale
        T[m] = cost
        T[m] -= cost[basis] @ T[:m]
        status, it = _kernel.simplex(T, basis, art0, max_iter, tol_opt, tol_piv, bland_after)
        iterations += it
        if status == ITERATION_LIMIT or status == NUMERIC_FAILURE:
            raise NumericFailure(f"phase 2 stopped with kernel status {status}")
        if status == UNBOUNDED:
            return Status.UNBOUNDED, None, iterations

    k = system.A.shape[0]
    weights = np.ones(k)
    orig = keep[keep < k]
    weights[orig] = row_scale[:orig.size]

    def point(xb):
        xs = np.zeros(ncols)
        xs[basis] = np.maximum(xb, 0.0)
        x = np.clip(sf.recover(xs[:ns] * col_scale), system.lower, system.upper)
        if not k:
            return x, 0.0
        # same yardstick as phase 1, plus round-off in proportion to each row's terms
        scaled = system.residuals(x) * weights
        magnitude = weights * (np.abs(system.A) @ np.abs(x) + np.abs(system.rhs))
        return x, float((scaled - 1e-13 * magnitude).max())

    x, worst = point(T[:m, -1])
    if worst > 10.0 * feas_limit:
        x, worst = point(_refine(T0[:, :-1], T0[:, -1], basis, T[:m, -1]))
        if worst > 10.0 * feas_limit:
            raise NumericFailure(f"solution violates a constraint by {worst:.3g} (equilibrated units)")
    return Status.OPTIMAL, x, iterations


def solve(lp: LinearProgram, *, tol_feas: float = TAU_FEAS, tol_opt: float = TAU_OPT,
          tol_piv: float = TAU_PIVOT) -> LpSolution:
    """Solve ``lp``; never returns a silently wrong optimum.

    Raises :class:`NumericFailure` when the kernel hits its iteration cap,
    meets an ambiguous near-zero pivot, or the recovered point fails the
    residual check.
    """
    status, x, iterations = _run(lp.objective, lp.system, lp.sense is Sense.MINIMIZE, False,
                                 tol_feas, tol_opt, tol_piv)
    if status is not Status.OPTIMAL:
        return LpSolution(status, iterations=iterations)
    x.setflags(write=False)
    return LpSolution(status, lp.evaluate(x), x, iterations)


def is_feasible(constraints: ConstraintSystem | Sequence, lower=None, upper=None, *,
                tol_feas: float = TAU_FEAS, tol_piv: float = TAU_PIVOT) -> bool:
    """Phase-1 feasibility of a constraint system.

    ``constraints`` is either a :class:`ConstraintSystem` or a sequence of
    :class:`Constraint` / ``(coeffs, relation, rhs)`` triples, in which case
    ``lower`` and ``upper`` give the variable bounds.
    """
    if isinstance(constraints, ConstraintSystem):
        system = constraints
        if lower is not None or upper is not None:
            system = ConstraintSystem(system.A, system.relations, system.rhs, lower, upper)
    else:
        system = ConstraintSystem.from_constraints(constraints, lower, upper)
    status, _, _ = _run(np.zeros(system.n_vars), system, True, True, tol_feas, TAU_OPT, tol_piv)
    return status is Status.OPTIMAL


__all__ = [
    "TAU_FEAS", "TAU_OPT", "TAU_PIVOT", "LPError", "InvalidInputError", "NumericFailure",
    "Sense", "Relation", "Status", "Constraint", "ConstraintSystem", "LinearProgram",
    "LpSolution", "solve", "is_feasible",
]
