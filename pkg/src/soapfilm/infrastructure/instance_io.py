"""Instance file reading and writing.

An instance file is UTF-8 text with one terminal per line as ``x y w``.
Blank lines and lines starting with ``#`` are skipped; the order of the
records is the insertion order of the terminals.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
from collections.abc import Sequence
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Optional

from soapfilm.domain.errors import (
    DuplicateTerminalError,
    InstanceParseError,
    WeightError,
)
from soapfilm.domain.geometry import Point, WeightedVertex

__all__ = [
    "ParsedInstance",
    "Template",
    "atomic_write_text",
    "format_instance",
    "load_template",
    "parse_instance",
    "read_instance",
    "write_instance",
]

logger = logging.getLogger(__name__)

DEFAULT_TEMPLATE = "assumption2_template.txt"


class ParsedInstance(NamedTuple):
    terminals: list[WeightedVertex]
    insertion_order: list[int]


class Template(NamedTuple):
    """Vertex positions with a group label each."""

    positions: list[Point]
    groups: list[str]


def _records(text: str) -> list[tuple[int, list[str]]]:
    records = []
    for number, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        # Skip empty lines and comments
        if stripped and not stripped.startswith("#"):
            records.append((number, stripped.split()))
    return records


def _coordinate(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError as e:
        msg = f"not a number: {token!r}"
        raise InstanceParseError(msg, line=line) from e
    if not math.isfinite(value):
        msg = f"coordinate must be finite, got {token!r}"
        raise InstanceParseError(msg, line=line)
    return value


def parse_instance(text: str) -> ParsedInstance:
    """Parse instance text into terminals.

    Terminal ids are assigned 0, 1, 2, ... in record order.

    Raises:
        InstanceParseError: If a record does not hold three numbers or the
            text holds no record at all.
        WeightError: If a weight is not a finite positive number.
        DuplicateTerminalError: If a position repeats an earlier one.

    Example:
        >>> parsed = parse_instance("# comment\\n\\n50 50 1")
        >>> len(parsed.terminals)
        1
    """
    terminals: list[WeightedVertex] = []
    seen: dict[tuple[float, float], int] = {}
    for line, fields in _records(text):
        if len(fields) != 3:
            msg = f"expected 'x y w', got {len(fields)} fields"
            raise InstanceParseError(msg, line=line)
        x = _coordinate(fields[0], line)
        y = _coordinate(fields[1], line)
        try:
            weight = float(fields[2])
        except ValueError as e:
            msg = f"not a number: {fields[2]!r}"
            raise InstanceParseError(msg, line=line) from e
        if not (math.isfinite(weight) and weight > 0):
            msg = f"weight must be a finite positive number, got {fields[2]!r}"
            raise WeightError(msg, line=line)
        if (x, y) in seen:
            msg = f"position ({fields[0]}, {fields[1]}) repeats line {seen[(x, y)]}"
            raise DuplicateTerminalError(msg, line=line)
        seen[(x, y)] = line
        terminals.append(WeightedVertex(len(terminals), Point(x, y), weight))

    if not terminals:
        msg = "instance holds no terminals"
        raise InstanceParseError(msg)
    return ParsedInstance(terminals, [v.id for v in terminals])


def _number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def format_instance(
    terminals: Sequence[WeightedVertex], header: Sequence[str] = ()
) -> str:
    """Serialise terminals in the order given; numbers round-trip exactly.

    Example:
        >>> format_instance([WeightedVertex(0, Point(0.5, 2.0), 7.0)])
        '0.5 2 7\\n'
    """
    lines = [f"# {comment}" for comment in header]
    lines.extend(
        f"{_number(v.pos.x)} {_number(v.pos.y)} {_number(v.weight)}" for v in terminals
    )
    return "\n".join(lines) + "\n"


def read_instance(path: Path) -> ParsedInstance:
    """Read and parse an instance file.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    if not path.exists():
        msg = f"Instance file not found: {path}"
        raise FileNotFoundError(msg)
    parsed = parse_instance(path.read_text(encoding="utf-8"))
    logger.debug("Read %d terminals from %s", len(parsed.terminals), path)
    return parsed


def atomic_write_text(path: Path, text: str) -> None:
    """Write a whole file at once through a temporary file and a rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def write_instance(
    path: Path, terminals: Sequence[WeightedVertex], header: Sequence[str] = ()
) -> None:
    atomic_write_text(path, format_instance(terminals, header))
    logger.info("Wrote %d terminals to %s", len(terminals), path)


def load_template(path: Optional[Path] = None) -> Template:
    """Load an experiment template of ``x y group`` records.

    Args:
        path: Template file; the bundled seven-vertex template when omitted.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        InstanceParseError: If a record is malformed or none is present.
    """
    if path is None:
        bundled = resources.files("soapfilm.infrastructure").joinpath("data")
        content = bundled.joinpath(DEFAULT_TEMPLATE).read_text(encoding="utf-8")
    else:
        if not path.exists():
            msg = f"Template file not found: {path}"
            raise FileNotFoundError(msg)
        content = path.read_text(encoding="utf-8")

    positions: list[Point] = []
    groups: list[str] = []
    for line, fields in _records(content):
        if len(fields) != 3:
            msg = f"expected 'x y group', got {len(fields)} fields"
            raise InstanceParseError(msg, line=line)
        positions.append(Point(_coordinate(fields[0], line), _coordinate(fields[1], line)))
        groups.append(fields[2])
    if not positions:
        msg = "template holds no vertices"
        raise InstanceParseError(msg)
    return Template(positions, groups)
