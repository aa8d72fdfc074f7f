"""
Contains test fixtures available across all test_*.py files.
"""

import logging
import os

import numpy
import pytest

from qubodualbounds.qubo_problem import QuboProblem
from qubodualbounds.solver_logging import PACKAGE_LOGGER

INSTANCE_DIRECTORY = os.path.join(os.path.dirname(__file__), "instances")


def random_problem(
    dimension: int,
    seed: int,
    density: float = 1.0,
    integer: bool = True,
    scale: int = 10,
) -> QuboProblem:
    """Seeded random QUBO. Integer problems keep 2·Q_ij and Q_ii + c_i integral."""
    rng = numpy.random.default_rng(seed)

    if integer:
        pair_terms = rng.integers(-scale, scale + 1, size=(dimension, dimension)).astype(float)
        linear = rng.integers(-scale, scale + 1, size=dimension).astype(float)
    else:
        pair_terms = rng.uniform(-scale, scale, size=(dimension, dimension))
        linear = rng.uniform(-scale, scale, size=dimension)

    mask = rng.random((dimension, dimension)) < density
    upper = numpy.triu(pair_terms * mask, k=1)
    quadratic = 0.5 * (upper + upper.T)
    return QuboProblem(quadratic, linear)


@pytest.fixture(name="instance_path")
def fixture_instance_path():
    def locate(name: str) -> str:
        return os.path.join(INSTANCE_DIRECTORY, name)

    return locate


@pytest.fixture(name="make_problem")
def fixture_make_problem():
    return random_problem


@pytest.fixture(name="one_variable_zero")
def fixture_one_variable_zero() -> QuboProblem:
    return QuboProblem([[0.0]], [0.0])


@pytest.fixture(name="two_variable")
def fixture_two_variable() -> QuboProblem:
    """c = (1, −1), Q = [[0, 1], [1, 0]]: maximum 2 at x = (1, 1)."""
    return QuboProblem([[0.0, 1.0], [1.0, 0.0]], [1.0, -1.0])


@pytest.fixture(name="unit_triangle")
def fixture_unit_triangle() -> QuboProblem:
    """MaxCut of the unit-weight triangle as a QUBO; maximum 2."""
    quadratic = -numpy.ones((3, 3)) + numpy.eye(3)
    return QuboProblem(quadratic, [2.0, 2.0, 2.0])


@pytest.fixture(name="mixed_problems")
def fixture_mixed_problems() -> list:
    """Small seeded instances across sizes, densities and integrality."""
    problems = []

    for seed in range(12):
        dimension = 4 + seed % 7
        density = (0.3, 0.6, 1.0)[seed % 3]
        problems.append(
            random_problem(dimension, seed, density=density, integer=seed % 4 != 3)
        )

    return problems


@pytest.fixture(autouse=True)
def fixture_restore_package_logger():
    """Undo setup_logging so caplog sees package records in every test."""
    yield
    log = logging.getLogger(PACKAGE_LOGGER)

    for handler in list(log.handlers):
        log.removeHandler(handler)

    log.setLevel(logging.NOTSET)
    log.propagate = True
