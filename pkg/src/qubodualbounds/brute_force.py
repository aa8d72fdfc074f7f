"""
Module: exhaustive maximization of small QUBOs, used as a reference answer.
"""

from __future__ import annotations

import numpy

from qubodualbounds.qubo_problem import QuboProblem

MAX_VARIABLES: int = 25
CHUNK_BITS: int = 16


def enumerate_maximum(problem: QuboProblem) -> tuple[float, numpy.ndarray]:
    """Exact maximum over all 2ⁿ assignments.

    Assignments are visited in the order of the integer whose bit k is x_k
    (x_0 least significant); the first maximizer found is returned.

    Parameters
    ----------
    problem : QuboProblem   n <= 25.

    Returns
    -------
    value, x : float, numpy.ndarray of int8
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    dimension = problem.dimension()

    if dimension > MAX_VARIABLES:
        raise ValueError(
            f"Refusing to enumerate n = {dimension} > {MAX_VARIABLES} variables."
        )

    quadratic = problem.quadratic()
    linear = problem.linear()
    bits = numpy.arange(dimension, dtype=numpy.int64)
    chunk = 1 << min(dimension, CHUNK_BITS)
    best_value = -numpy.inf
    best_code = 0

    for first in range(0, 1 << dimension, chunk):
        codes = numpy.arange(first, first + chunk, dtype=numpy.int64)
        points = ((codes[:, None] >> bits) & 1).astype(float)
        values = numpy.einsum("ki,ij,kj->k", points, quadratic, points) + points @ linear
        position = int(numpy.argmax(values))

        if values[position] > best_value:
            best_value = float(values[position])
            best_code = int(codes[position])

    x = ((best_code >> bits) & 1).astype(numpy.int8)
    return best_value + problem.offset(), x
