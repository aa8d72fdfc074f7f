"""
Module: contains serialize_triplet and class ResultWriter
used to write instances back out and to save result documents as JSON.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path

import numpy

from qubodualbounds.qubo_problem import QuboProblem


def serialize_triplet(problem: QuboProblem) -> str:
    """Write a problem in the triplet grammar.

    The diagonal record for i carries c_i + Q_ii (binary x² = x) and the
    record for i < j carries 2·Q_ij, so the text reparses to the same objective.
    Zero coefficients are omitted; reals are written with 17 significant digits.

    Parameters
    ----------
    problem : QuboProblem   Must have a zero offset (the grammar cannot hold one).

    Returns
    -------
    text : str
    """
    if not isinstance(problem, QuboProblem):
        raise TypeError("Argument 'problem' is not the expected QuboProblem.")

    if problem.offset() != 0.0:
        raise ValueError("Triplet format cannot represent a nonzero offset.")

    quadratic = problem.quadratic()
    diagonal = problem.linear() + numpy.diag(quadratic)
    records: list = []

    for i in range(problem.dimension()):
        if diagonal[i] != 0.0:
            records.append(f"{i + 1} {i + 1} {format(float(diagonal[i]), '.17g')}")

        for j in range(i + 1, problem.dimension()):
            if quadratic[i, j] != 0.0:
                records.append(
                    f"{i + 1} {j + 1} {format(float(2.0 * quadratic[i, j]), '.17g')}"
                )

    lines = [f"{problem.dimension()} {len(records)}"] + records
    return "\n".join(lines) + "\n"


def _json_ready(value: object) -> object:
    """numpy values to builtins; non-finite floats to None."""
    if isinstance(value, dict):
        return {str(key): _json_ready(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [_json_ready(item) for item in value]

    if isinstance(value, numpy.ndarray):
        return _json_ready(value.tolist())

    if isinstance(value, numpy.generic):
        return _json_ready(value.item())

    if isinstance(value, float) and not math.isfinite(value):
        return None

    return value


def result_json(document: dict) -> str:
    """Stable JSON text for one result document (sorted keys, strict JSON)."""
    if not isinstance(document, dict):
        raise TypeError("Argument 'document' is not the expected dict.")

    return json.dumps(_json_ready(document), sort_keys=True, indent=2, allow_nan=False)


class ResultWriter:
    """
    Collects result documents and writes them as JSON.
    """

    def __init__(self) -> None:
        self.__log = logging.getLogger(__name__)
        self.__results: list = []

    def add_result(self, document: dict) -> None:
        """Allows external code to queue one result document.

        Parameters
        ----------
        document : dict
        """
        if not isinstance(document, dict):
            self.__log.error("Argument 'document' is not the expected dict.")
            raise TypeError("Argument 'document' is not the expected dict.")

        self.__results.append(document)

    def num_results(self) -> int:
        return len(self.__results)

    def write(self, result_filename: str | Path) -> tuple:
        """Write the queued documents: a single object for one result, a list otherwise.

        Parameters
        ----------
        result_filename : str or Path

        Returns
        -------
        package : tuple of (bool, Path) representing success/filename
        """
        if not isinstance(result_filename, (str, Path)) or len(str(result_filename)) == 0:
            self.__log.error("Argument 'result_filename' is not the expected str or Path.")
            raise TypeError("Argument 'result_filename' is not the expected str or Path.")

        target = Path(result_filename)

        if self.num_results() == 0:
            return False, target

        target.parent.mkdir(parents=True, exist_ok=True)

        if self.num_results() == 1:
            text = result_json(self.__results[0])
        else:
            text = json.dumps(
                _json_ready(self.__results), sort_keys=True, indent=2, allow_nan=False
            )

        try:
            target.write_text(text + "\n", encoding="utf-8")
        except OSError:  # pragma: no cover
            self.__log.exception(
                "Unable to write results to '{result_filename}'.",
                extra={"result_filename": str(target)},
            )
            raise

        self.__log.info(
            "Wrote {count} result(s) to '{result_filename}'.",
            extra={"count": self.num_results(), "result_filename": str(target)},
        )
        return True, target


if __name__ == "__main__":
    pass
