"""
Module test_cli.py, which performs automated
testing of the command-line front end.
"""

import json

import pytest

from qubodualbounds.cli import (
    EXIT_INPUT_ERROR,
    EXIT_NUMERIC_ERROR,
    EXIT_OK,
    build_parser,
    main,
)
from qubodualbounds.instance_reader import parse_triplet
from qubodualbounds.solver_errors import NumericFailure

STABLE_KEYS = {
    "status",
    "best_value",
    "best_x",
    "bound",
    "rel_gap_percent",
    "nodes",
    "wall_time_s",
    "seed",
    "params",
}


def run_json(argv: list, capsys) -> tuple:
    status = main(argv)
    captured = capsys.readouterr()
    return status, json.loads(captured.out) if captured.out else None, captured.err


def test_brute(instance_path, capsys) -> None:
    status, document, _ = run_json(["brute", instance_path("two_variable.txt")], capsys)
    assert status == EXIT_OK
    assert STABLE_KEYS <= set(document)
    assert document["best_value"] == 2.0
    assert document["best_x"] == [1, 1]
    assert document["status"] == "Optimal"


def test_bound_without_iterations(instance_path, capsys) -> None:
    status, document, _ = run_json(
        ["bound", instance_path("two_variable.txt"), "-N", "0"], capsys
    )
    assert status == EXIT_OK
    assert document["termination"] == "IterLimit"
    assert document["iterations"] == 0
    assert document["bound"] >= 2.0
    assert len(document["u_hat"]) == 2
    assert document["status"] is None
    assert document["params"] == {"N": 0, "k1": 5, "k2": 2}


def test_solve_maxcut(instance_path, capsys) -> None:
    status, document, _ = run_json(
        ["solve", instance_path("unit_triangle_maxcut.txt"), "--format", "maxcut"], capsys
    )
    assert status == EXIT_OK
    assert STABLE_KEYS <= set(document)
    assert document["status"] == "Optimal"
    assert document["best_value"] == 2.0
    assert document["rel_gap_percent"] == 0.0
    assert document["params"]["N"] == 5
    assert document["params"]["warmstart"] is True
    assert "descent_iterations" in document
    assert "root_bound" in document


def test_solve_options(instance_path, capsys, tmp_path) -> None:
    target = tmp_path / "out" / "result.json"
    status, document, err = run_json(
        [
            "solve",
            instance_path("mixed_six.txt"),
            "--node-limit",
            "1",
            "--no-warmstart",
            "--primal",
            "-100",
            "--json-out",
            str(target),
            "--table",
        ],
        capsys,
    )
    assert status == EXIT_OK
    assert document["status"] == "NodeLimit"
    assert document["params"]["warmstart"] is False
    assert json.loads(target.read_text(encoding="utf-8")) == document
    assert "status" in err


def test_solve_is_deterministic(instance_path, capsys) -> None:
    argv = ["solve", instance_path("mixed_six.txt"), "--seed", "4"]
    first = run_json(argv, capsys)[1]
    second = run_json(argv, capsys)[1]
    first.pop("wall_time_s")
    second.pop("wall_time_s")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_convert(instance_path, capsys, tmp_path, unit_triangle) -> None:
    status = main(["convert", instance_path("unit_triangle_maxcut.txt"), "--format", "maxcut"])
    assert status == EXIT_OK
    assert parse_triplet(capsys.readouterr().out) == unit_triangle

    target = tmp_path / "triangle.txt"
    assert (
        main(
            [
                "convert",
                instance_path("unit_triangle_maxcut.txt"),
                "--format",
                "maxcut",
                "--output",
                str(target),
            ]
        )
        == EXIT_OK
    )
    assert parse_triplet(target.read_text(encoding="utf-8")) == unit_triangle


def test_warmstart_command(instance_path, capsys, tmp_path) -> None:
    target = tmp_path / "study.json"
    status = main(
        [
            "warmstart",
            instance_path("mixed_six.txt"),
            "-N",
            "200",
            "--json-out",
            str(target),
        ]
    )
    assert status == EXIT_OK
    assert "warm" in capsys.readouterr().out
    records = json.loads(target.read_text(encoding="utf-8"))
    assert [record["start"] for record in records] == ["cold", "warm"]


def test_input_errors(instance_path, capsys) -> None:
    assert main(["solve", instance_path("bad_index.txt")]) == EXIT_INPUT_ERROR
    assert "Line 2" in capsys.readouterr().err

    assert main(["brute", instance_path("missing.txt")]) == EXIT_INPUT_ERROR
    assert main(["bound", instance_path("two_variable.txt"), "--k1", "0"]) == EXIT_INPUT_ERROR

    with pytest.raises(SystemExit):
        build_parser().parse_args(["solve"])


def test_numeric_abort(instance_path, capsys, monkeypatch) -> None:
    def failing_shift(*args, **kwargs):
        raise NumericFailure("Lanczos stalled.")

    monkeypatch.setattr("qubodualbounds.cli.trivial_shift", failing_shift)
    assert main(["bound", instance_path("two_variable.txt")]) == EXIT_NUMERIC_ERROR
    assert "numeric error" in capsys.readouterr().err


def test_verbose_progress(instance_path, capsys) -> None:
    assert main(["solve", instance_path("mixed_six.txt"), "-v"]) == EXIT_OK
    progress = [
        json.loads(line)
        for line in capsys.readouterr().err.splitlines()
        if line.startswith("{")
    ]
    assert any(record["logger"].endswith("instance_reader") for record in progress)
    search = [
        record for record in progress if record["logger"].endswith("branch_and_bound")
    ]
    assert search
    assert all("gap_percent" in record for record in search)
    assert all(record["level"] == "INFO" for record in search)
