"""Exception hierarchy for the solver.

Library code raises these; the CLI translates them into exit codes.
"""

from __future__ import annotations

from typing import Optional

__all__ = [
    "CapExceededError",
    "DegenerateAngleError",
    "DegenerateTriangleError",
    "DuplicateTerminalError",
    "GeometryError",
    "InfeasiblePlaneTreeError",
    "InstanceError",
    "InstanceParseError",
    "SoapFilmError",
    "WeightError",
]


class SoapFilmError(Exception):
    """Base class for all solver errors."""


class GeometryError(SoapFilmError, ValueError):
    """A geometric primitive received degenerate input."""


class DegenerateAngleError(GeometryError):
    """An angle was requested with a zero-length ray."""


class DegenerateTriangleError(GeometryError):
    """A triangle has two coincident corners."""


class InstanceError(SoapFilmError, ValueError):
    """Invalid terminal data, optionally tied to a line of an instance file."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InstanceParseError(InstanceError):
    """A record is not of the form ``x y w``."""


class WeightError(InstanceError):
    """A weight is not a finite positive number."""


class DuplicateTerminalError(InstanceError):
    """Two terminals share a position."""


class InfeasiblePlaneTreeError(SoapFilmError, RuntimeError):
    """No crossing-free edge can connect the remaining terminals."""


class CapExceededError(SoapFilmError, ValueError):
    """The exhaustive oracle was asked for more terminals than it supports."""
