"""
Module test_start_protocols.py, which performs automated
testing of the coldstart/warmstart protocols and the WarmstartStudy class.
"""

import numpy
import pandas
import pytest

from qubodualbounds.descent_solver import DescentParams, descend
from qubodualbounds.lmi_oracles import LmiSystem, initial_feasible_point
from qubodualbounds.qubo_problem import QuboProblem, trivial_shift
from qubodualbounds.solver_status import Termination
from qubodualbounds.start_protocols import (
    STUDY_COLUMNS,
    WarmstartStudy,
    calibrated_coldstart,
    calibrated_warmstart,
    coldstart_shift,
    perturbation_profile,
    perturbed_warmstart,
    shifted_geometric_mean,
    start_gap,
)

STUDY_PARAMS = DescentParams(iteration_limit=3000)


def reference_descent(problem: QuboProblem):
    system = LmiSystem(problem)
    start = initial_feasible_point(system, trivial_shift(problem))
    result = descend(system, start, STUDY_PARAMS)
    return result, result.bound + problem.offset()


def test_coldstart_shift(two_variable) -> None:
    numpy.testing.assert_allclose(coldstart_shift(two_variable, 1.05).u, [1.05, 1.05])
    numpy.testing.assert_allclose(coldstart_shift(two_variable, 3.0).u, [3.0, 3.0])
    assert coldstart_shift(two_variable, 2.0).convexifying

    with pytest.raises(ValueError):
        coldstart_shift(two_variable, 1.0)


def test_perturbation_profile() -> None:
    rng = numpy.random.default_rng(1)
    u_star = numpy.array([0.0, 3.2, -45.0, 0.002])
    profile = perturbation_profile(u_star, rng)
    assert 0.1 <= profile[0] <= 1.0
    assert 0.1 <= profile[1] <= 1.0
    assert 1.0 <= profile[2] <= 10.0
    assert 1e-4 <= profile[3] <= 1e-3

    shift = perturbed_warmstart(u_star, 2.0, numpy.random.default_rng(1))
    numpy.testing.assert_allclose(shift.u, u_star + 2.0 * profile)

    with pytest.raises(ValueError):
        perturbed_warmstart(u_star, -1.0, rng)


def test_calibrated_starts(make_problem) -> None:
    for seed in range(4):
        problem = make_problem(12, seed=200 + seed)
        result, reference = reference_descent(problem)

        cold = calibrated_coldstart(problem, reference)
        cold_gap = start_gap(problem, cold.u, reference)
        assert 85.0 <= cold_gap <= 95.0 or (
            numpy.allclose(cold.u, coldstart_shift(problem, 1.05).u) and cold_gap > 95.0
        )

        warm = calibrated_warmstart(
            problem, result.u_hat, reference, rng=numpy.random.default_rng(seed)
        )
        warm_gap = start_gap(problem, warm.u, reference)
        assert 7.0 <= warm_gap <= 8.0
        assert numpy.all(warm.u >= result.u_hat)


def test_shifted_geometric_mean() -> None:
    assert shifted_geometric_mean([0.0, 0.0]) == pytest.approx(0.0)
    assert shifted_geometric_mean([6.0, 15.0]) == pytest.approx(10.0)
    assert shifted_geometric_mean([5.0], shift=1.0) == pytest.approx(5.0)
    assert numpy.isnan(shifted_geometric_mean([]))

    with pytest.raises(ValueError):
        shifted_geometric_mean([-20.0])


def test_warmstart_economy(make_problem) -> None:
    problems = [make_problem(50, seed=700 + seed) for seed in range(20)]
    study = WarmstartStudy(params=DescentParams.standalone(), seed=3)
    frame = study.run(problems)

    assert isinstance(frame, pandas.DataFrame)
    assert list(frame.columns) == STUDY_COLUMNS
    assert len(frame) == 40
    assert frame is study.results()

    means = frame.groupby("start")["iterations"].mean()
    assert means["warm"] <= 0.5 * means["cold"]

    gaps = frame.groupby("start")["start_gap_percent"].mean()
    assert gaps["warm"] < gaps["cold"]

    summary = study.summary()
    assert "cold" in summary
    assert "warm" in summary
    assert "sgm iterations" in summary


def test_reference_preset_is_tighter(make_problem) -> None:
    preset = DescentParams.reference()
    assert preset.bisection_steps == 20
    assert preset.iteration_limit == 50000
    assert preset.g_tol < DescentParams().g_tol

    problem = make_problem(15, seed=77)
    system = LmiSystem(problem)
    start = initial_feasible_point(system, trivial_shift(problem))
    prefix = descend(system, start, DescentParams.reference(iteration_limit=3))
    converged = descend(system, start, preset)
    assert converged.outer_iters >= prefix.outer_iters
    assert converged.bound <= prefix.bound + 1e-9 * (1.0 + abs(prefix.bound))
    assert converged.termination != Termination.ITER_LIMIT


def test_study_validation(two_variable) -> None:
    with pytest.raises(TypeError):
        WarmstartStudy(params="fast")

    with pytest.raises(TypeError):
        WarmstartStudy(reference_params="slow")

    study = WarmstartStudy()
    assert study.summary() == ""

    with pytest.raises(ValueError):
        study.run([two_variable], names=["a", "b"])

    with pytest.raises(TypeError):
        study.run(["problem"])
