"""Configuration loader.

Builds a SolveConfig from defaults, environment variables (optionally
read from a ``.env`` file) and explicit overrides, in increasing order
of precedence.
"""

from __future__ import annotations

import logging
import os
from typing import Any, Callable

from dotenv import load_dotenv

from soapfilm.domain.config import MergePolicy, Ordering, RelaxObjective, SolveConfig

__all__ = ["ENV_VARIABLES", "load_solve_config"]

logger = logging.getLogger(__name__)

ENV_PREFIX = "SOAPFILM_"


def _enum_parser(enum_type: type[Any]) -> Callable[[str], Any]:
    def parse(raw: str) -> Any:
        return enum_type(raw.strip().lower())

    return parse


ENV_VARIABLES: dict[str, tuple[str, Callable[[str], Any]]] = {
    "SOAPFILM_TOLERANCE": ("angle_tolerance_fraction", float),
    "SOAPFILM_ORDERING": ("ordering", _enum_parser(Ordering)),
    "SOAPFILM_MERGE_POLICY": ("merge_policy", _enum_parser(MergePolicy)),
    "SOAPFILM_TILT_DEGREES": ("tilt_degrees", float),
    "SOAPFILM_RELAX_OBJECTIVE": ("relax_objective", _enum_parser(RelaxObjective)),
    "SOAPFILM_COLLISION_EPSILON": ("collision_epsilon", float),
}


def load_solve_config(**overrides: Any) -> SolveConfig:
    """Load solver configuration.

    Args:
        **overrides: SolveConfig field values; ``None`` values are ignored
            so unset CLI flags fall through to the environment.

    Returns:
        A validated SolveConfig.

    Raises:
        ValueError: If an environment variable holds an invalid value or
            the combined configuration fails validation.

    Example:
        >>> config = load_solve_config(tilt_degrees=0.0)
        >>> config.tilt_degrees
        0.0
    """
    load_dotenv()
    values: dict[str, Any] = {}
    for variable, (field_name, parse) in ENV_VARIABLES.items():
        raw = os.getenv(variable)
        if raw is None or not raw.strip():
            continue
        try:
            values[field_name] = parse(raw)
        except ValueError as e:
            msg = f"Invalid value for {variable}: {raw!r}"
            raise ValueError(msg) from e
        logger.debug("%s=%s taken from environment", field_name, raw)

    values.update({key: value for key, value in overrides.items() if value is not None})
    return SolveConfig(**values)
