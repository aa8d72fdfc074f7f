"""
Module test_qubo_problem.py, which performs automated
testing of the QuboProblem class and its operations.
"""

import itertools

import numpy
import pytest

from qubodualbounds.qubo_problem import (
    QcrShift,
    QuboProblem,
    as_assignment,
    evaluate_qubo,
    fix_variable,
    qcr_objective,
    strictness_margin,
    trivial_shift,
)
from qubodualbounds.solver_errors import EmptyProblem


def test_problem_validation() -> None:
    with pytest.raises(ValueError):
        QuboProblem([[0.0, 1.0], [2.0, 0.0]], [0.0, 0.0])

    with pytest.raises(ValueError):
        QuboProblem([[0.0]], [0.0, 1.0])

    with pytest.raises(ValueError):
        QuboProblem(numpy.zeros((0, 0)), [])

    with pytest.raises(ValueError):
        QuboProblem([[numpy.nan]], [0.0])

    with pytest.raises(TypeError):
        QuboProblem([[0.0]], [0.0], offset="1")

    problem = QuboProblem([[1.0]], [2.0], offset=3)
    assert problem.dimension() == 1
    assert problem.offset() == 3.0
    assert repr(problem) == "QuboProblem(n=1, offset=3.0)"

    with pytest.raises(ValueError):
        problem.quadratic()[0, 0] = 5.0


def test_equality(two_variable) -> None:
    assert two_variable == QuboProblem([[0, 1], [1, 0]], [1, -1])
    assert two_variable != QuboProblem([[0, 1], [1, 0]], [1, -1], offset=1.0)
    assert two_variable.__eq__("not a problem") is NotImplemented


def test_integer_valued(two_variable) -> None:
    assert two_variable.integer_valued()
    assert QuboProblem([[0, 0.5], [0.5, 0]], [0, 0]).integer_valued()
    assert not QuboProblem([[0, 0.25], [0.25, 0]], [0, 0]).integer_valued()
    assert not QuboProblem([[0.5]], [0.0]).integer_valued()
    assert QuboProblem([[0.5]], [0.5]).integer_valued()


def test_assignment_validation() -> None:
    assert as_assignment([1, 0, 1], 3).dtype == numpy.int8

    with pytest.raises(ValueError):
        as_assignment([1, 0], 3)

    with pytest.raises(ValueError):
        as_assignment([1, 0.5], 2)


def test_evaluate_qubo(two_variable) -> None:
    assert evaluate_qubo(two_variable, [1, 1]) == 2.0
    assert evaluate_qubo(two_variable, [1, 0]) == 1.0
    assert evaluate_qubo(two_variable, [0, 0]) == 0.0

    shifted = QuboProblem([[0, 1], [1, 0]], [1, -1], offset=-7.5)
    assert evaluate_qubo(shifted, [0, 0]) == -7.5

    with pytest.raises(ValueError):
        evaluate_qubo(two_variable, [1, 1, 1])

    with pytest.raises(TypeError):
        evaluate_qubo("problem", [1, 1])


def test_qcr_objective(two_variable, make_problem) -> None:
    assert qcr_objective(two_variable, QcrShift(numpy.array([1.0, 1.0])), [1, 1]) == 2.0
    assert qcr_objective(two_variable, numpy.array([3.0, -2.0]), [0, 0]) == 0.0

    problem = make_problem(5, seed=3)
    rng = numpy.random.default_rng(3)

    for _ in range(5):
        u = rng.normal(scale=10.0, size=5)

        for x in itertools.product((0, 1), repeat=5):
            assert qcr_objective(problem, u, x) == pytest.approx(
                evaluate_qubo(problem, x), abs=1e-9
            )

    with pytest.raises(ValueError):
        qcr_objective(two_variable, numpy.ones(3), [0.5, 0.5])


def test_fix_variable(two_variable) -> None:
    child = fix_variable(two_variable, 1, 1)
    assert numpy.array_equal(child.quadratic(), [[0.0]])
    assert numpy.array_equal(child.linear(), [3.0])
    assert child.offset() == -1.0
    assert evaluate_qubo(child, [1]) == 2.0

    zero_child = fix_variable(two_variable, 1, 0)
    assert numpy.array_equal(zero_child.linear(), [1.0])
    assert zero_child.offset() == 0.0

    diagonal = QuboProblem([[2.0, 0.0], [0.0, 3.0]], [0.0, 0.0])
    child = fix_variable(diagonal, 0, 1)
    assert child.offset() == 2.0
    assert numpy.array_equal(child.linear(), [0.0])
    assert numpy.array_equal(child.quadratic(), [[3.0]])

    with pytest.raises(EmptyProblem):
        fix_variable(QuboProblem([[1.0]], [1.0]), 0, 1)

    with pytest.raises(ValueError):
        fix_variable(two_variable, 2, 1)

    with pytest.raises(ValueError):
        fix_variable(two_variable, 0, 2)


def test_fix_variable_preserves_values(make_problem) -> None:
    problem = make_problem(6, seed=11, integer=False)

    for index in range(6):
        for value in (0, 1):
            child = fix_variable(problem, index, value)

            for rest in itertools.product((0, 1), repeat=5):
                full = list(rest)
                full.insert(index, value)
                assert evaluate_qubo(child, rest) == pytest.approx(
                    evaluate_qubo(problem, full), abs=1e-9
                )


def test_trivial_shift(two_variable, make_problem) -> None:
    shift = trivial_shift(two_variable)
    assert shift.convexifying
    numpy.testing.assert_allclose(shift.u, [2.0, 2.0], atol=1e-9)
    eigenvalues = numpy.linalg.eigvalsh(numpy.diag(shift.u) - two_variable.quadratic())
    numpy.testing.assert_allclose(eigenvalues, [1.0, 3.0], atol=1e-9)

    numpy.testing.assert_allclose(
        trivial_shift(QuboProblem(numpy.zeros((3, 3)), numpy.zeros(3))).u, numpy.ones(3)
    )
    numpy.testing.assert_allclose(trivial_shift(QuboProblem([[5.0]], [0.0])).u, [6.0])

    assert strictness_margin(0.0) == 1.0
    assert strictness_margin(-500.0) == 5.0

    problem = make_problem(12, seed=4, integer=False)
    shifted = problem.quadratic() - numpy.diag(trivial_shift(problem).u)
    assert numpy.linalg.eigvalsh(shifted).max() <= -0.999
