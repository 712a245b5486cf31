"""Solver configuration.

This module defines the tunable knobs of the soap-film heuristic as a
frozen dataclass together with the enums selecting its policies.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Optional

__all__ = [
    "DEFAULT_ANGLE_TOLERANCE",
    "DEFAULT_COLLISION_EPSILON",
    "DEFAULT_RELAX_STEP_CAP",
    "DEFAULT_RELAX_TOLERANCE",
    "DEFAULT_TILT_DEGREES",
    "ITERATIONS_PER_TERMINAL",
    "TOPOLOGY_RATIO",
    "MergePolicy",
    "Ordering",
    "RelaxObjective",
    "SolveConfig",
]

DEFAULT_ANGLE_TOLERANCE = 0.022
DEFAULT_RELAX_STEP_CAP = 2000
DEFAULT_RELAX_TOLERANCE = 1e-10
DEFAULT_COLLISION_EPSILON = 1e-6
DEFAULT_TILT_DEGREES = 1.3
DEFAULT_TOPOLOGY_RATIO_MARGIN = 1e-6
ITERATIONS_PER_TERMINAL = 50
TOPOLOGY_RATIO = math.sqrt(3.0) - 1.0
STEINER_ANGLE = 120.0


class Ordering(str, Enum):
    """Order in which vertices are examined for sliding and detachment."""

    INPUT_ORDER = "input"
    ACUTEST_FIRST = "acutest"


class MergePolicy(str, Enum):
    """Weight a terminal carries after a Steiner point collapses onto it."""

    TERMINAL_KEEPS_WEIGHT = "keep"
    TERMINAL_ADOPTS_STEINER_WEIGHT = "adopt"


class RelaxObjective(str, Enum):
    """Length minimised when Steiner points are relaxed.

    ``SURFACE_TENSION`` moves Steiner points as a soap film does, with all
    edges pulling equally, so free junctions settle at 120 degrees.
    ``WEIGHTED`` uses the edge factors ``(w_S + w_n) / 2`` and minimises
    the weighted total length directly.
    """

    SURFACE_TENSION = "surface-tension"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class SolveConfig:
    """Tolerances and policies for one heuristic run.

    Attributes:
        angle_tolerance_fraction: Fraction of 120 degrees tolerated as a
            deficit at Steiner vertices (0.022 accepts 117.36 degrees).
        relax_step_cap: Maximum relaxation sweeps per relax call.
        relax_tolerance: Relative per-sweep decrease that ends relaxation.
        collision_epsilon: Contraction length as a fraction of the
            terminals' bounding-box diagonal.
        tilt_degrees: Clockwise nudge for a stagnating Steiner-Steiner
            edge; 0 disables it.
        ordering: Vertex processing order.
        merge_policy: Terminal weight after a Steiner collision.
        relax_objective: Length minimised by relaxation.
        outer_iteration_cap: Outer loop cap; None means 50 per terminal.
        topology_ratio_margin: Relative slack below the sqrt(3) - 1 bound
            before the topology rule fires.
    """

    angle_tolerance_fraction: float = DEFAULT_ANGLE_TOLERANCE
    relax_step_cap: int = DEFAULT_RELAX_STEP_CAP
    relax_tolerance: float = DEFAULT_RELAX_TOLERANCE
    collision_epsilon: float = DEFAULT_COLLISION_EPSILON
    tilt_degrees: float = DEFAULT_TILT_DEGREES
    ordering: Ordering = Ordering.INPUT_ORDER
    merge_policy: MergePolicy = MergePolicy.TERMINAL_KEEPS_WEIGHT
    relax_objective: RelaxObjective = RelaxObjective.SURFACE_TENSION
    outer_iteration_cap: Optional[int] = None
    topology_ratio_margin: float = DEFAULT_TOPOLOGY_RATIO_MARGIN
    topology_ratio: float = field(default=TOPOLOGY_RATIO, init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.angle_tolerance_fraction < 1.0:
            msg = (
                "angle_tolerance_fraction must lie in [0, 1), "
                f"got {self.angle_tolerance_fraction}"
            )
            raise ValueError(msg)
        if self.relax_step_cap < 1:
            msg = f"relax_step_cap must be at least 1, got {self.relax_step_cap}"
            raise ValueError(msg)
        if not self.relax_tolerance > 0:
            msg = f"relax_tolerance must be positive, got {self.relax_tolerance}"
            raise ValueError(msg)
        if not (math.isfinite(self.collision_epsilon) and self.collision_epsilon > 0):
            msg = f"collision_epsilon must be positive, got {self.collision_epsilon}"
            raise ValueError(msg)
        if not math.isfinite(self.tilt_degrees):
            msg = f"tilt_degrees must be finite, got {self.tilt_degrees}"
            raise ValueError(msg)
        if self.outer_iteration_cap is not None and self.outer_iteration_cap < 1:
            msg = f"outer_iteration_cap must be at least 1, got {self.outer_iteration_cap}"
            raise ValueError(msg)
        if not 0.0 <= self.topology_ratio_margin < 1.0:
            msg = f"topology_ratio_margin must lie in [0, 1), got {self.topology_ratio_margin}"
            raise ValueError(msg)

    @property
    def angle_threshold(self) -> float:
        """Smallest Steiner angle accepted, in degrees."""
        return STEINER_ANGLE * (1.0 - self.angle_tolerance_fraction)

    @property
    def topology_bound(self) -> float:
        """Ratio below which a Steiner-Steiner edge counts as collapsing."""
        return self.topology_ratio * (1.0 - self.topology_ratio_margin)

    def iteration_cap(self, terminal_count: int) -> int:
        if self.outer_iteration_cap is not None:
            return self.outer_iteration_cap
        return ITERATIONS_PER_TERMINAL * max(terminal_count, 1)

    def to_dict(self) -> dict[str, Any]:
        """Plain values for the JSON config echo."""
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data
