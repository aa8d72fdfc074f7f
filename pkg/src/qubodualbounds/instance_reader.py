"""
Module: contains class InstanceReader
used to parse QUBO instances (sparse triplets) and MaxCut instances (edge lists).

Both grammars are line oriented: '#' starts a comment, blank lines are skipped,
the first remaining line is the header "n m", and exactly m records follow.
Indices in the files are 1-based.
"""

from __future__ import annotations

import io
import logging
import os
from enum import Enum

import numpy
import pandas  # type: ignore[import]

from qubodualbounds.qubo_problem import QuboProblem
from qubodualbounds.solver_errors import InstanceFormatError

ENTRY_COLUMNS: list = ["line", "i", "j", "value"]


class InstanceFormat(Enum):  # pylint: disable=too-few-public-methods
    """
    Which grammar does the instance follow?
    """

    TRIPLET = 1
    MAXCUT = 2

    @classmethod
    def convert(cls, format_str: str | InstanceFormat) -> InstanceFormat:
        """Create an InstanceFormat object from a string like "maxcut".

        Parameters
        ----------
        format_str : str

        Returns
        -------
        instance_format : InstanceFormat object
        """
        if isinstance(format_str, InstanceFormat):
            return format_str

        if not isinstance(format_str, str):
            raise TypeError("Input 'format_str' is not the expected string.")

        if format_str.strip().lower() == "triplet":
            return InstanceFormat.TRIPLET

        if format_str.strip().lower() == "maxcut":
            return InstanceFormat.MAXCUT

        raise ValueError(f"Unknown instance format '{format_str}'.")

    def __str__(self) -> str:
        return self.name.lower()


class InstanceReader:
    """
    Parses instance text into a QuboProblem.
    The parsed records stay available as a pandas DataFrame through entries().
    """

    def __init__(self, instance_format: str | InstanceFormat = "triplet") -> None:
        self.__log = logging.getLogger(__name__)
        self.__format: InstanceFormat = InstanceFormat.convert(instance_format)
        self.__contents: list = []
        self.__entries: pandas.DataFrame = pandas.DataFrame(columns=ENTRY_COLUMNS)

    @staticmethod
    def __index(token: str, dimension: int, line_number: int) -> int:
        """Parse a 1-based index and return it 0-based."""
        try:
            index = int(token)
        except ValueError as bad_int:
            raise InstanceFormatError(
                f"'{token}' is not an integer index.", line_number
            ) from bad_int

        if not 1 <= index <= dimension:
            raise InstanceFormatError(
                f"Index {index} lies outside [1, {dimension}].", line_number
            )

        return index - 1

    @staticmethod
    def __number(token: str, line_number: int) -> float:
        try:
            value = float(token)
        except ValueError as bad_float:
            raise InstanceFormatError(
                f"'{token}' is not a number.", line_number
            ) from bad_float

        if not numpy.isfinite(value):
            raise InstanceFormatError(f"Value '{token}' is not finite.", line_number)

        return value

    def __header(self) -> tuple[int, int, list]:
        """Split the contents into the header and the data records.

        Returns
        -------
        n, m, records : the header counts and a list of (line_number, tokens)
        """
        header: tuple | None = None
        records: list = []

        for line_number, raw_line in enumerate(self.__contents, start=1):
            tokens = raw_line.split("#", 1)[0].split()

            if not tokens:
                continue

            if header is None:
                header = (line_number, tokens)
            else:
                records.append((line_number, tokens))

        if header is None:
            raise InstanceFormatError("Missing header line 'n m'.")

        header_line, header_tokens = header

        if len(header_tokens) != 2:
            raise InstanceFormatError(
                f"Header must be 'n m', found {len(header_tokens)} fields.", header_line
            )

        try:
            dimension, count = (int(token) for token in header_tokens)
        except ValueError as bad_header:
            raise InstanceFormatError(
                "Header fields must be integers.", header_line
            ) from bad_header

        if dimension < 1:
            raise InstanceFormatError("Header n must be at least 1.", header_line)

        if count < 0:
            raise InstanceFormatError("Header m must be nonnegative.", header_line)

        if len(records) > count:
            raise InstanceFormatError(
                f"Found more than the {count} records the header announced.",
                records[count][0],
            )

        if len(records) < count:
            raise InstanceFormatError(
                f"Header announced {count} records, found {len(records)}.",
                records[-1][0] if records else header_line,
            )

        return dimension, count, records

    def __open_file(self, instance_filename: str) -> None:
        if os.path.exists(instance_filename):
            with open(file=instance_filename, encoding="utf-8") as file_obj:
                self.__contents = file_obj.readlines()
        else:
            self.__log.error(
                "Unable to find file '{instance_filename}'.",
                extra={"instance_filename": instance_filename},
            )
            raise FileNotFoundError(f"Unable to find file '{instance_filename}'.")

    def __open_text(self, block_txt: str) -> None:
        #   Read the text block AS IF it were a file.
        with io.StringIO(block_txt) as text_block:
            self.__contents = text_block.readlines()

    def __parse_records(self, dimension: int, records: list) -> pandas.DataFrame:
        """Turn data records into rows of 0-based (i, j, value).

        Returns
        -------
        entries : pandas.DataFrame with columns line, i, j, value
        """
        rows: list = []

        for line_number, tokens in records:
            if self.__format == InstanceFormat.TRIPLET:
                if len(tokens) != 3:
                    raise InstanceFormatError(
                        f"Expected 'i j v', found {len(tokens)} fields.", line_number
                    )

                i = self.__index(tokens[0], dimension, line_number)
                j = self.__index(tokens[1], dimension, line_number)

                if i > j:
                    raise InstanceFormatError(
                        f"Entry ({i + 1}, {j + 1}) must have i <= j.", line_number
                    )

            else:
                if len(tokens) not in (2, 3):
                    raise InstanceFormatError(
                        f"Expected 'i j [w]', found {len(tokens)} fields.", line_number
                    )

                i = self.__index(tokens[0], dimension, line_number)
                j = self.__index(tokens[1], dimension, line_number)

                if i == j:
                    raise InstanceFormatError(
                        f"Self-loop on node {i + 1}.", line_number
                    )

                #   Undirected: store each edge with its smaller endpoint first.
                i, j = min(i, j), max(i, j)

            value = 1.0 if len(tokens) == 2 else self.__number(tokens[2], line_number)
            rows.append((line_number, i, j, value))

        entries = pandas.DataFrame(rows, columns=ENTRY_COLUMNS)

        if not entries.empty:
            repeated = entries.duplicated(subset=["i", "j"], keep="first")

            if repeated.any():
                first = entries[repeated].iloc[0]
                kind = "entry" if self.__format == InstanceFormat.TRIPLET else "edge"
                raise InstanceFormatError(
                    f"Duplicate {kind} ({int(first['i']) + 1}, {int(first['j']) + 1}).",
                    int(first["line"]),
                )

        return entries

    def __read(self) -> QuboProblem:
        dimension, count, records = self.__header()
        entries = self.__parse_records(dimension, records)
        self.__entries = entries
        quadratic = numpy.zeros((dimension, dimension))
        linear = numpy.zeros(dimension)
        rows = entries["i"].to_numpy(dtype=int)
        columns = entries["j"].to_numpy(dtype=int)
        values = entries["value"].to_numpy(dtype=float)

        if self.__format == InstanceFormat.TRIPLET:
            diagonal = rows == columns
            numpy.add.at(linear, rows[diagonal], values[diagonal])
            off = ~diagonal
            quadratic[rows[off], columns[off]] = 0.5 * values[off]
            quadratic[columns[off], rows[off]] = 0.5 * values[off]
        else:
            #   Cut value Σ w_ij (x_i + x_j − 2·x_i·x_j).
            numpy.add.at(linear, rows, values)
            numpy.add.at(linear, columns, values)
            quadratic[rows, columns] = -values
            quadratic[columns, rows] = -values

        self.__log.info(
            "Parsed {instance_format} instance: n = {dimension}, {count} records.",
            extra={
                "instance_format": str(self.__format),
                "dimension": dimension,
                "count": count,
            },
        )
        return QuboProblem(quadratic, linear, 0.0)

    def entries(self) -> pandas.DataFrame:
        """Records of the last successful read (0-based i, j)."""
        return self.__entries

    def instance_format(self) -> InstanceFormat:
        return self.__format

    def read_file(self, instance_filename: str) -> QuboProblem:
        """Parse an instance FILE.

        Parameters
        ----------
        instance_filename : str

        Returns
        -------
        problem : QuboProblem
        """
        if not isinstance(instance_filename, str) or len(instance_filename) == 0:
            self.__log.error("Argument 'instance_filename' is not the expected str.")
            raise TypeError("Argument 'instance_filename' is not the expected str.")

        self.__open_file(instance_filename=instance_filename)
        return self.__read()

    def read_text(self, block_txt: str) -> QuboProblem:
        """Parse a BLOCK of TEXT.

        Parameters
        ----------
        block_txt : str

        Returns
        -------
        problem : QuboProblem
        """
        if not isinstance(block_txt, str):
            self.__log.error("Argument 'block_txt' is not the expected str.")
            raise TypeError("Argument 'block_txt' is not the expected str.")

        self.__open_text(block_txt=block_txt)
        return self.__read()


def parse_triplet(text: str) -> QuboProblem:
    """i == j adds v to c_i; i < j puts v/2 in Q_ij and Q_ji."""
    return InstanceReader("triplet").read_text(text)


def parse_maxcut(text: str) -> QuboProblem:
    """Edge list to the QUBO whose objective is the cut value."""
    return InstanceReader("maxcut").read_text(text)


def read_instance(
    instance_filename: str, instance_format: str | InstanceFormat = "triplet"
) -> QuboProblem:
    return InstanceReader(instance_format).read_file(instance_filename)


if __name__ == "__main__":
    pass
