"""
Module: contains the Termination and BnbStatus enumerations.
"""

from __future__ import annotations

from enum import Enum


class Termination(Enum):
    """Why did a plane-projection descent stop?"""

    ITER_LIMIT = 1
    BOUNDARY_STALL = 2
    STATIONARY_POINT = 3
    DEGENERATE = 4

    @classmethod
    def convert(cls, termination_str: str) -> Termination:
        """Create a Termination object from a string like "IterLimit".

        Parameters
        ----------
        termination_str : str

        Returns
        -------
        termination : Termination object
        """
        if not isinstance(termination_str, str):
            raise TypeError("Input 'termination_str' is not the expected string.")

        squashed: str = termination_str.replace("_", "").lower()

        for member in Termination:
            if str(member).lower() == squashed:
                return member

        raise ValueError(f"Unknown termination '{termination_str}'.")

    def __str__(self) -> str:
        if self == Termination.ITER_LIMIT:
            return "IterLimit"

        if self == Termination.BOUNDARY_STALL:
            return "BoundaryStall"

        if self == Termination.STATIONARY_POINT:
            return "StationaryPoint"

        return "Degenerate"


class BnbStatus(Enum):
    """How did a branch-and-bound run end?"""

    OPTIMAL = 1
    TIME_LIMIT = 2
    NODE_LIMIT = 3
    MEMORY_ABORT = 4

    @classmethod
    def convert(cls, status_str: str) -> BnbStatus:
        """Create a BnbStatus object from a string like "Optimal".

        Parameters
        ----------
        status_str : str

        Returns
        -------
        status : BnbStatus object
        """
        if not isinstance(status_str, str):
            raise TypeError("Input 'status_str' is not the expected string.")

        squashed: str = status_str.replace("_", "").lower()

        for member in BnbStatus:
            if str(member).lower() == squashed:
                return member

        raise ValueError(f"Unknown status '{status_str}'.")

    def finished(self) -> bool:
        """Did the search close the gap (as opposed to hitting a limit)?

        Returns
        -------
        finished : bool
        """
        return self == BnbStatus.OPTIMAL

    def __str__(self) -> str:
        if self == BnbStatus.OPTIMAL:
            return "Optimal"

        if self == BnbStatus.TIME_LIMIT:
            return "TimeLimit"

        if self == BnbStatus.NODE_LIMIT:
            return "NodeLimit"

        return "MemoryAbort"


if __name__ == "__main__":
    pass
