import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_bounded_lp, vertex_enumeration
from robdea.lp import (
    Constraint,
    ConstraintSystem,
    InvalidInputError,
    LinearProgram,
    NumericFailure,
    Relation,
    Sense,
    Status,
    _kernel,
    is_feasible,
    solve,
)


def lp(c, A, rel, b, lower=None, upper=None, sense=Sense.MAXIMIZE):
    return LinearProgram.from_arrays(c, A, rel, b, lower, upper, sense)


def to_lp(c, A, rel, rhs, lower, upper, sense):
    return lp(c, A, rel, rhs, lower, upper, Sense.MAXIMIZE if sense == "max" else Sense.MINIMIZE)


@pytest.fixture
def python_backend():
    previous = _kernel.use_backend("python")
    yield
    _kernel.use_backend(previous)


class TestSmallProblems:
    def test_textbook_maximum(self):
        # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        sol = solve(lp([3, 5], [[1, 0], [0, 2], [3, 2]], ["<="] * 3, [4, 12, 18]))
        assert sol.status is Status.OPTIMAL
        assert sol.objective_value == pytest.approx(36)
        np.testing.assert_allclose(sol.variable_values, [2, 6], atol=1e-12)

    def test_minimum_with_ge_rows(self):
        # min 2x + 3y, x + y >= 4, x + 3y >= 6  ->  x = 3, y = 1, value 9
        sol = solve(lp([2, 3], [[1, 1], [1, 3]], [">=", ">="], [4, 6], sense=Sense.MINIMIZE))
        assert sol.objective_value == pytest.approx(9)
        np.testing.assert_allclose(sol.variable_values, [3, 1], atol=1e-12)

    def test_equality_row(self):
        sol = solve(lp([1, 1], [[1, 2]], ["="], [4]))
        assert sol.objective_value == pytest.approx(4)

    def test_unbounded(self):
        sol = solve(lp([1, 1], [[1, -1]], ["<="], [1]))
        assert sol.status is Status.UNBOUNDED
        assert sol.objective_value is None and sol.variable_values is None

    def test_infeasible(self):
        sol = solve(lp([1], [[1], [1]], ["<=", ">="], [1, 2]))
        assert sol.status is Status.INFEASIBLE

    def test_free_and_negative_bounds(self):
        # min x with x free and x >= -3 written as a row
        sol = solve(lp([1], [[1]], [">="], [-3], lower=[-np.inf], sense=Sense.MINIMIZE))
        assert sol.objective_value == pytest.approx(-3)
        sol = solve(lp([1, 1], [[1, 1]], ["<="], [10], lower=[-2, -5], upper=[1, 1], sense=Sense.MINIMIZE))
        assert sol.objective_value == pytest.approx(-7)

    def test_only_upper_bound(self):
        sol = solve(lp([1], np.zeros((0, 1)), [], [], lower=[-np.inf], upper=[2.5]))
        assert sol.objective_value == pytest.approx(2.5)

    def test_no_rows(self):
        assert solve(lp([-1, -2], np.zeros((0, 2)), [], [])).objective_value == 0
        assert solve(lp([1], np.zeros((0, 1)), [], [])).status is Status.UNBOUNDED

    def test_zero_rows_checked_directly(self):
        assert solve(lp([1], [[0], [1]], ["<=", "<="], [1, 2])).objective_value == pytest.approx(2)
        assert solve(lp([1], [[0], [1]], [">=", "<="], [1, 2])).status is Status.INFEASIBLE

    def test_degenerate_cycling_example(self):
        # Beale's example: cycles under plain Dantzig pricing without safeguards
        c = [0.75, -150, 0.02, -6]
        A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
        sol = solve(lp(c, A, ["<="] * 3, [0, 0, 1]))
        assert sol.objective_value == pytest.approx(0.05)

    def test_badly_scaled_rows(self):
        sol = solve(lp([1, 1], [[1e6, 0], [0, 1e-6]], ["<=", "<="], [2e6, 3e-6]))
        assert sol.objective_value == pytest.approx(5)

    def test_solution_satisfies_constraints(self):
        sol = solve(lp([1, 2, 3], [[1, 1, 1], [2, -1, 0], [0, 1, -1]], ["<=", ">=", "="], [6, -1, 0]))
        res = LinearProgram.from_arrays([1, 2, 3], [[1, 1, 1], [2, -1, 0], [0, 1, -1]],
                                        ["<=", ">=", "="], [6, -1, 0]).system.residuals(sol.variable_values)
        assert res.max() <= 1e-9


class TestInputValidation:
    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            lp([1, 2], [[1, 2, 3]], ["<="], [1])
        with pytest.raises(InvalidInputError):
            lp([1], [[1]], ["<=", "<="], [1])

    def test_non_finite(self):
        with pytest.raises(InvalidInputError):
            lp([1], [[np.nan]], ["<="], [1])
        with pytest.raises(InvalidInputError):
            lp([1], [[1]], ["<="], [np.inf])

    def test_bad_bounds_and_relations(self):
        with pytest.raises(InvalidInputError):
            lp([1], [[1]], ["<="], [1], lower=[2], upper=[1])
        with pytest.raises(InvalidInputError):
            lp([1], [[1]], ["<"], [1])

    def test_constraint_objects_round_trip(self):
        cons = [Constraint((1.0, 2.0), Relation.LE, 3.0), ((1, 0), ">=", 1)]
        system = ConstraintSystem.from_constraints(cons)
        assert system.relations == (Relation.LE, Relation.GE)
        assert system.constraints[0] == cons[0]
        assert not system.A.flags.writeable

    def test_accessors(self):
        prog = lp([1, 2], [[1, 1]], ["<="], [1], sense=Sense.MINIMIZE)
        assert prog.objective_sense is Sense.MINIMIZE
        assert list(prog.objective_coeffs) == [1, 2]
        assert list(prog.variable_lower_bounds) == [0, 0]
        assert np.isinf(prog.variable_upper_bounds).all()
        assert len(prog.constraints) == 1


class TestFeasibility:
    def test_is_feasible(self):
        assert is_feasible(ConstraintSystem([[1, 1]], ["<="], [1]))
        assert not is_feasible(ConstraintSystem([[1, 1]], [">="], [1], upper=[0.4, 0.5]))
        assert is_feasible(ConstraintSystem([[1, 1]], [">="], [1], upper=[0.5, 0.5]))
        assert is_feasible([((1, -1), "=", 0)])


class TestAgainstVertexEnumeration:
    def test_random_bounded_lps(self):
        rng = np.random.default_rng(7)
        for _ in range(150):
            c, A, rel, rhs, lo, hi, sense = random_bounded_lp(rng)
            ref = vertex_enumeration(c, A, rel, rhs, lo, hi, sense)
            sol = solve(to_lp(c, A, rel, rhs, lo, hi, sense))
            if ref is None:
                assert sol.status is Status.INFEASIBLE
            else:
                assert sol.status is Status.OPTIMAL
                assert sol.objective_value == pytest.approx(ref, abs=1e-7)

    def test_python_backend_agrees(self, python_backend):
        rng = np.random.default_rng(8)
        for _ in range(40):
            c, A, rel, rhs, lo, hi, sense = random_bounded_lp(rng)
            ref = vertex_enumeration(c, A, rel, rhs, lo, hi, sense)
            sol = solve(to_lp(c, A, rel, rhs, lo, hi, sense))
            assert (ref is None) == (sol.status is Status.INFEASIBLE)
            if ref is not None:
                assert sol.objective_value == pytest.approx(ref, abs=1e-7)


class TestDeterminism:
    def test_repeat_solves_identical(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            prog = to_lp(*random_bounded_lp(rng))
            a, b = solve(prog), solve(prog)
            assert a.status is b.status and a.iterations == b.iterations
            if a.optimal:
                assert a.variable_values.tobytes() == b.variable_values.tobytes()

    @pytest.mark.skipif("cython" not in _kernel.available_backends(), reason="extension not built")
    def test_backends_bitwise_identical(self):
        rng = np.random.default_rng(10)
        previous = _kernel.backend_name()
        try:
            for _ in range(200):
                prog = to_lp(*random_bounded_lp(rng))
                out = []
                for name in ("cython", "python"):
                    _kernel.use_backend(name)
                    s = solve(prog)
                    out.append((s.status, s.iterations, None if s.variable_values is None
                                else s.variable_values.tobytes()))
                assert out[0] == out[1]
        finally:
            _kernel.use_backend(previous)

    def test_environment_forces_fallback(self):
        code = "from robdea.lp import _kernel; print(_kernel.backend_name())"
        env = dict(os.environ, ROBDEA_BACKEND="python")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=60)
        assert out.stdout.strip() == "python"

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            _kernel.use_backend("fortran")


def test_iteration_cap_raises(monkeypatch):
    def stuck(*args):
        return 2, 0  # kernel status: iteration limit
    monkeypatch.setattr(_kernel, "simplex", stuck)
    with pytest.raises(NumericFailure):
        solve(lp([1, 1], [[1, 1]], [">="], [1], sense=Sense.MINIMIZE))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_objective_scaling(seed, factor):
    """Scaling the objective scales the optimum and keeps the status."""
    c, A, rel, rhs, lo, hi, sense = random_bounded_lp(np.random.default_rng(seed))
    a = solve(to_lp(c, A, rel, rhs, lo, hi, sense))
    b = solve(to_lp(np.asarray(c) * factor, A, rel, rhs, lo, hi, sense))
    assert a.status is b.status
    if a.optimal:
        assert b.objective_value == pytest.approx(factor * a.objective_value, rel=1e-7, abs=1e-7 * factor)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimal_points_are_feasible(seed):
    prog = to_lp(*random_bounded_lp(np.random.default_rng(seed)))
    sol = solve(prog)
    if sol.optimal:
        scale = 1 + np.abs(prog.system.A).sum(axis=1) * np.abs(sol.variable_values).max()
        assert (prog.system.residuals(sol.variable_values) <= 1e-8 * scale).all()
        assert (sol.variable_values >= prog.system.lower).all()
        assert (sol.variable_values <= prog.system.upper).all()
        assert sol.objective_value == pytest.approx(prog.evaluate(sol.variable_values))
