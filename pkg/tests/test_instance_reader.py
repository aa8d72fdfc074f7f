"""
Module test_instance_reader.py, which performs automated
testing of the InstanceReader class.
"""

import itertools
import logging

import numpy
import pandas
import pytest

from qubodualbounds.brute_force import enumerate_maximum
from qubodualbounds.instance_reader import (
    InstanceFormat,
    InstanceReader,
    parse_maxcut,
    parse_triplet,
    read_instance,
)
from qubodualbounds.qubo_problem import QuboProblem, evaluate_qubo
from qubodualbounds.solver_errors import InstanceFormatError


def test_instance_format_class() -> None:
    with pytest.raises(TypeError):
        InstanceFormat.convert(None)

    with pytest.raises(ValueError):
        InstanceFormat.convert("ORLIB")

    assert InstanceFormat.convert("triplet") == InstanceFormat.TRIPLET
    assert InstanceFormat.convert(" MaxCut ") == InstanceFormat.MAXCUT
    assert InstanceFormat.convert(InstanceFormat.MAXCUT) == InstanceFormat.MAXCUT
    assert str(InstanceFormat.TRIPLET) == "triplet"


def test_triplet_examples(two_variable) -> None:
    assert parse_triplet("2 3 \n 1 1 1 \n 2 2 -1 \n 1 2 2") == two_variable

    single = parse_triplet("1 0")
    assert single == QuboProblem([[0.0]], [0.0])

    with pytest.raises(InstanceFormatError) as bad_index:
        parse_triplet("2 1 \n 1 3 1")

    assert bad_index.value.line_number == 2
    assert "Line 2" in str(bad_index.value)


def test_triplet_errors() -> None:
    bad_texts = {
        "": None,
        "# only a comment\n": None,
        "2\n": 1,
        "two 1\n1 1 1\n": 1,
        "0 0\n": 1,
        "2 2\n1 1 1\n": 2,
        "2 1\n1 1 1\n2 2 1\n": 3,
        "2 1\n1 1\n": 2,
        "2 1\n2 1 4\n": 2,
        "2 1\n1 x 4\n": 2,
        "2 1\n1 2 nan\n": 2,
        "2 1\n1 2 four\n": 2,
    }

    for text, line_number in bad_texts.items():
        with pytest.raises(InstanceFormatError) as bad_text:
            parse_triplet(text)

        assert bad_text.value.line_number == line_number

    with pytest.raises(TypeError):
        InstanceReader().read_text(None)


def test_triplet_file(instance_path) -> None:
    reader = InstanceReader("triplet")
    problem = reader.read_file(instance_path("mixed_six.txt"))
    assert problem.dimension() == 6
    assert problem.linear()[0] == 3.0
    assert problem.quadratic()[0, 1] == -2.0
    assert problem.quadratic()[2, 5] == problem.quadratic()[5, 2] == -3.5
    assert numpy.all(numpy.diag(problem.quadratic()) == 0.0)

    entries = reader.entries()
    assert isinstance(entries, pandas.DataFrame)
    assert len(entries) == 11
    assert list(entries.columns) == ["line", "i", "j", "value"]
    assert entries.iloc[0]["line"] == 4
    assert reader.instance_format() == InstanceFormat.TRIPLET

    with pytest.raises(InstanceFormatError) as duplicate:
        reader.read_file(instance_path("duplicate_entry.txt"))

    assert duplicate.value.line_number == 4

    with pytest.raises(FileNotFoundError):
        reader.read_file(instance_path("no_such_instance.txt"))

    with pytest.raises(TypeError):
        reader.read_file("")


def test_maxcut_examples(unit_triangle, instance_path) -> None:
    triangle = read_instance(instance_path("unit_triangle_maxcut.txt"), "maxcut")
    assert triangle == unit_triangle
    assert evaluate_qubo(triangle, [1, 0, 0]) == 2.0
    assert evaluate_qubo(triangle, [1, 1, 1]) == 0.0
    assert enumerate_maximum(triangle)[0] == 2.0

    assert parse_maxcut("4 0\n") == QuboProblem(numpy.zeros((4, 4)), numpy.zeros(4))

    edge = parse_maxcut("2 1\n2 1 5\n")
    assert evaluate_qubo(edge, [1, 0]) == 5.0
    assert evaluate_qubo(edge, [1, 1]) == 0.0


def test_maxcut_errors(instance_path) -> None:
    with pytest.raises(InstanceFormatError) as self_loop:
        parse_maxcut("2 1\n2 2 1\n")

    assert self_loop.value.line_number == 2

    with pytest.raises(InstanceFormatError) as duplicate:
        read_instance(instance_path("duplicate_edge_maxcut.txt"), "maxcut")

    assert duplicate.value.line_number == 3

    with pytest.raises(InstanceFormatError):
        parse_maxcut("2 1\n1 2 3 4\n")


def test_maxcut_conversion_is_exact() -> None:
    rng = numpy.random.default_rng(10)

    for _ in range(25):
        nodes = int(rng.integers(2, 11))
        pairs = [
            pair for pair in itertools.combinations(range(1, nodes + 1), 2)
            if rng.random() < 0.5
        ]
        weights = rng.integers(1, 10, size=len(pairs))
        lines = [f"{nodes} {len(pairs)}"] + [
            f"{i} {j} {w}" for (i, j), w in zip(pairs, weights)
        ]
        problem = parse_maxcut("\n".join(lines))

        best_cut = 0.0

        for x in itertools.product((0, 1), repeat=nodes):
            cut = sum(
                float(w) for (i, j), w in zip(pairs, weights) if x[i - 1] != x[j - 1]
            )
            assert evaluate_qubo(problem, x) == cut
            best_cut = max(best_cut, cut)

        assert enumerate_maximum(problem)[0] == best_cut


def test_reader_logs_argument_errors(caplog) -> None:
    caplog.set_level(logging.ERROR, logger="qubodualbounds")
    reader = InstanceReader()

    with pytest.raises(TypeError):
        reader.read_text(None)

    with pytest.raises(TypeError):
        reader.read_file(42)

    messages = [record.getMessage() for record in caplog.records]
    assert any("block_txt" in message for message in messages)
    assert any("instance_filename" in message for message in messages)
