"""
Module: contains setup_logging and the JSON-lines formatter used for
structured progress records.

Log calls throughout the package put brace placeholders in the message
and the values in `extra`, e.g.
    log.info("Node {nodes} processed.", extra={"nodes": 17})
The formatter fills the placeholders and also emits every extra field.
"""

from __future__ import annotations

import json
import logging
import sys
from typing import TextIO

import numpy

PACKAGE_LOGGER: str = "qubodualbounds"

#   Attributes every LogRecord carries; anything else came in through `extra`.
_STANDARD_ATTRIBUTES: frozenset = frozenset(
    vars(logging.LogRecord("", 0, "", 0, "", None, None)).keys()
) | {"message", "asctime", "taskName"}


def _plain(value: object) -> object:
    """Make numpy scalars and arrays JSON-friendly."""
    if isinstance(value, numpy.ndarray):
        return value.tolist()

    if isinstance(value, numpy.generic):
        return value.item()

    return value


class JsonLineFormatter(logging.Formatter):
    """
    Renders each record as one JSON object per line.
    """

    def format(self, record: logging.LogRecord) -> str:
        fields: dict = {
            key: _plain(value)
            for key, value in vars(record).items()
            if key not in _STANDARD_ATTRIBUTES
        }

        try:
            message = record.getMessage().format(**fields)
        except (KeyError, IndexError, ValueError):
            message = record.getMessage()

        document: dict = {
            "level": record.levelname,
            "logger": record.name,
            "message": message,
        }
        document.update(fields)

        if record.exc_info:
            document["exception"] = self.formatException(record.exc_info)

        return json.dumps(document, sort_keys=True, default=str)


def setup_logging(verbosity: int = 0, stream: TextIO | None = None) -> logging.Logger:
    """Configure the package logger.

    Parameters
    ----------
    verbosity : int     0 → WARNING, 1 → INFO, 2 or more → DEBUG.
    stream : TextIO     Defaults to sys.stderr.

    Returns
    -------
    log : logging.Logger
    """
    if not isinstance(verbosity, int) or verbosity < 0:
        raise ValueError("Argument 'verbosity' must be a nonnegative int.")

    log = logging.getLogger(PACKAGE_LOGGER)

    for handler in list(log.handlers):
        if getattr(handler, "qubodualbounds_handler", False):
            log.removeHandler(handler)

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    handler.qubodualbounds_handler = True  # type: ignore[attr-defined]
    log.addHandler(handler)

    if verbosity == 0:
        log.setLevel(logging.WARNING)
    elif verbosity == 1:
        log.setLevel(logging.INFO)
    else:
        log.setLevel(logging.DEBUG)

    log.propagate = False
    return log
