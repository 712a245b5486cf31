"""Randomised experiments over the solvers.

``assumption2_experiment`` draws random weights for a fixed vertex
template and checks whether the weighted MST ever produces the forbidden
crossing between the two triangles of the template, and whether the
heuristic output stays plane. ``sandwich_sweep`` compares heuristic,
exhaustive optimum and plane WMST on small instances.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from statistics import fmean
from typing import Optional

import numpy as np

from soapfilm.application.heuristic import min_adjacent_angle
from soapfilm.application.protocols import SteinerSolverProtocol
from soapfilm.application.solvers import ExhaustiveSolver, SoapFilmSolver
from soapfilm.domain.config import SolveConfig
from soapfilm.domain.errors import InfeasiblePlaneTreeError
from soapfilm.domain.geometry import Point, WeightedVertex
from soapfilm.domain.tree import PlaneTree, crossing_pairs
from soapfilm.domain.wmst import weighted_mst

__all__ = [
    "Assumption2Stats",
    "Assumption2Trial",
    "SandwichRecord",
    "SandwichStats",
    "assumption2_experiment",
    "forbidden_pattern",
    "sandwich_sweep",
]

logger = logging.getLogger(__name__)

BIG_GROUP = "big"
SMALL_GROUP = "small"
DEFAULT_WEIGHT_RANGE = (1, 9)
SANDWICH_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Assumption2Trial:
    """Outcome of one random weight assignment."""

    weights: tuple[int, ...]
    wmst: PlaneTree
    wmst_crossings: int
    pattern: bool
    heuristic_crossings: Optional[int]


@dataclass
class Assumption2Stats:
    """Counts over all trials of :func:`assumption2_experiment`."""

    trials: list[Assumption2Trial] = field(default_factory=list)
    infeasible: int = 0

    @property
    def trial_count(self) -> int:
        return len(self.trials)

    @property
    def wmst_crossings(self) -> int:
        """Trials whose WMST has at least one crossing edge pair."""
        return sum(1 for t in self.trials if t.wmst_crossings)

    @property
    def pattern_occurrences(self) -> int:
        return sum(1 for t in self.trials if t.pattern)

    @property
    def heuristic_violations(self) -> int:
        return sum(1 for t in self.trials if t.heuristic_crossings)

    def to_dict(self) -> dict[str, object]:
        return {
            "trials": self.trial_count,
            "wmst_crossings": self.wmst_crossings,
            "pattern_occurrences": self.pattern_occurrences,
            "heuristic_violations": self.heuristic_violations,
            "infeasible": self.infeasible,
            "weights": [list(t.weights) for t in self.trials],
        }


def forbidden_pattern(tree: PlaneTree, groups: dict[int, str]) -> bool:
    """Whether two crossing edges both join the big triangle to the small one.

    Args:
        tree: A spanning tree over the template vertices.
        groups: Group label per vertex id; ``"big"`` and ``"small"`` mark
            the two triangles, anything else is ignored.
    """

    def bridges(edge: tuple[int, int]) -> bool:
        return {groups.get(edge[0]), groups.get(edge[1])} == {BIG_GROUP, SMALL_GROUP}

    for diagnostic in crossing_pairs(tree):
        a, b = diagnostic.edge_a, diagnostic.edge_b
        if set(a) & set(b):
            continue
        if bridges(a) and bridges(b):
            return True
    return False


def assumption2_experiment(
    positions: Sequence[Point],
    groups: Sequence[str],
    trials: int,
    seed: int,
    *,
    weight_range: tuple[int, int] = DEFAULT_WEIGHT_RANGE,
    solver: Optional[SteinerSolverProtocol] = None,
    run_heuristic: bool = True,
) -> Assumption2Stats:
    """Draw random integer weights for a template and test planarity.

    Each trial assigns weights uniformly from ``weight_range`` (inclusive),
    builds the weighted MST and records its crossings and whether they
    form the forbidden bridge pattern; with ``run_heuristic`` set
    ``solver`` (the soap-film heuristic with default settings unless
    given) is run as well and the crossings of its tree are recorded.

    Raises:
        ValueError: If ``trials`` is below one, the weight range is
            invalid, or ``positions`` and ``groups`` differ in length.

    Example:
        >>> pts = [Point(0, 0), Point(1, 0), Point(0, 1)]
        >>> stats = assumption2_experiment(pts, ["big"] * 3, 2, seed=1)
        >>> stats.trial_count
        2
    """
    if trials < 1:
        msg = f"At least one trial is required, got {trials}"
        raise ValueError(msg)
    low, high = weight_range
    if not 1 <= low <= high:
        msg = f"Invalid weight range {weight_range}"
        raise ValueError(msg)
    if len(positions) != len(groups):
        msg = f"{len(positions)} positions but {len(groups)} group labels"
        raise ValueError(msg)

    heuristic: SteinerSolverProtocol = SoapFilmSolver() if solver is None else solver
    rng = np.random.default_rng(seed)
    labels = dict(enumerate(groups))
    stats = Assumption2Stats()

    for index in range(trials):
        weights = tuple(int(w) for w in rng.integers(low, high + 1, size=len(positions)))
        terminals = [
            WeightedVertex(i, p, float(w)) for i, (p, w) in enumerate(zip(positions, weights))
        ]
        wmst = weighted_mst(terminals)
        crossings = len(crossing_pairs(wmst))
        pattern = forbidden_pattern(wmst, labels)
        heuristic_crossings: Optional[int] = None
        if run_heuristic:
            try:
                solved = heuristic.solve(terminals)
            except InfeasiblePlaneTreeError as e:
                stats.infeasible += 1
                logger.warning("Trial %d: %s", index, e)
            else:
                heuristic_crossings = len(crossing_pairs(solved.tree))
        if pattern:
            logger.warning("Trial %d: forbidden WMST pattern, weights %s", index, weights)
        if heuristic_crossings:
            logger.warning("Trial %d: %d heuristic crossings", index, heuristic_crossings)
        stats.trials.append(
            Assumption2Trial(weights, wmst, crossings, pattern, heuristic_crossings)
        )

    logger.info(
        "%d trials: %d WMSTs with crossings, %d forbidden patterns, %d non-plane outputs",
        stats.trial_count,
        stats.wmst_crossings,
        stats.pattern_occurrences,
        stats.heuristic_violations,
    )
    return stats


@dataclass(frozen=True)
class SandwichRecord:
    """Lengths of one instance under the three solvers."""

    terminal_count: int
    oracle: float
    heuristic: float
    plane_wmst: float
    merge_events: int
    steiner_degree_violations: int
    steiner_angle_violations: int

    @property
    def lower_violation(self) -> bool:
        return self.oracle > self.heuristic * (1.0 + SANDWICH_TOLERANCE)

    @property
    def upper_violation(self) -> bool:
        return self.heuristic > self.plane_wmst * (1.0 + SANDWICH_TOLERANCE)

    @property
    def gap(self) -> float:
        return self.heuristic / self.oracle if self.oracle > 0 else 1.0


@dataclass
class SandwichStats:
    records: list[SandwichRecord] = field(default_factory=list)

    @property
    def lower_violations(self) -> int:
        return sum(1 for r in self.records if r.lower_violation)

    @property
    def upper_violations(self) -> int:
        """Heuristic above the plane WMST, not counting runs with merge events."""
        return sum(1 for r in self.records if r.upper_violation and not r.merge_events)

    @property
    def merge_exempt(self) -> int:
        return sum(1 for r in self.records if r.upper_violation and r.merge_events)

    @property
    def postcondition_violations(self) -> int:
        return sum(r.steiner_degree_violations + r.steiner_angle_violations for r in self.records)

    @property
    def mean_gap(self) -> float:
        return fmean(r.gap for r in self.records) if self.records else 1.0


def sandwich_sweep(
    instances: Sequence[Sequence[WeightedVertex]],
    config: Optional[SolveConfig] = None,
    *,
    reference: Optional[SteinerSolverProtocol] = None,
) -> SandwichStats:
    """Check ``reference <= heuristic <= plane WMST`` on every instance.

    The reference solver defaults to the exhaustive search. Also counts
    Steiner points of the heuristic output whose degree is not three or
    whose smallest adjacent angle is below the tolerance threshold.
    """
    heuristic = SoapFilmSolver(config)
    exact: SteinerSolverProtocol = ExhaustiveSolver() if reference is None else reference
    cfg = heuristic.config
    stats = SandwichStats()
    for index, terminals in enumerate(instances):
        outcome = heuristic.run(terminals)
        optimum = exact.solve(terminals)
        tree = outcome.tree
        degree_violations = sum(1 for s in tree.steiner_ids() if tree.degree(s) != 3)
        angle_violations = 0
        for s in tree.steiner_ids():
            smallest = min_adjacent_angle(tree, s)
            if smallest is None or smallest < cfg.angle_threshold:
                angle_violations += 1
        record = SandwichRecord(
            terminal_count=len(terminals),
            oracle=optimum.metrics.weighted_length,
            heuristic=outcome.report.final_metrics.weighted_length,
            plane_wmst=outcome.report.plane_wmst_metrics.weighted_length,
            merge_events=outcome.report.merge_events,
            steiner_degree_violations=degree_violations,
            steiner_angle_violations=angle_violations,
        )
        if record.lower_violation or (record.upper_violation and not record.merge_events):
            logger.warning("Instance %d breaks the length ordering: %s", index, record)
        stats.records.append(record)
    logger.info(
        "Sandwich sweep over %d instances: mean heuristic/optimum %.4f",
        len(stats.records),
        stats.mean_gap,
    )
    return stats
