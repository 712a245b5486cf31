"""Soap-film heuristic for weighted Steiner minimal trees.

The pipeline starts from the plane WMST and imitates a soap film that
peels off the pins it connects:

1. ``slide_inherent`` swaps an edge pair for the third side of a terminal
   triangle when one of its corners is an inherent Steiner point.
2. ``detach_steiner`` inserts a Steiner point wherever two adjacent edges
   meet at less than 120 degrees (less the configured tolerance).
3. ``relax`` moves Steiner points by coordinate descent.
4. ``flick_zero_edges`` contracts vanishing film strips.
5. ``apply_topology_rule`` re-pairs collapsing Steiner-Steiner edges and
   splits junctions of degree four or more.

``solve`` repeats the cycle until nothing changes and every Steiner point
is settled, guarding against iterations that lengthen the tree or
introduce crossings.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, NamedTuple, Optional

from soapfilm.domain.config import (
    STEINER_ANGLE,
    MergePolicy,
    Ordering,
    RelaxObjective,
    SolveConfig,
)
from soapfilm.domain.errors import DegenerateAngleError, DegenerateTriangleError
from soapfilm.domain.geometry import (
    Point,
    Segment,
    WeightedVertex,
    angle_at,
    connection_cost,
    euclid_dist,
    fermat_point,
    midpoint,
    rotate_about,
    segments_cross,
    weighted_distance_sum,
    weighted_fermat_point,
)
from soapfilm.domain.tree import (
    Edge,
    PlanarityDiagnostic,
    PlaneTree,
    TreeMetrics,
    crossing_pairs,
    tree_metrics,
)
from soapfilm.domain.wmst import plane_weighted_mst, weighted_mst

__all__ = [
    "EventKind",
    "SolveOutcome",
    "SolveReport",
    "Trace",
    "TraceEvent",
    "apply_topology_rule",
    "detach_steiner",
    "flick_zero_edges",
    "min_adjacent_angle",
    "relax",
    "slide_inherent",
    "solve",
    "steiner_settled",
    "weighted_gradient",
]

logger = logging.getLogger(__name__)

SPLICE_ANGLE = 179.9
RELAX_BACKTRACKS = 40
SETTLED_GRADIENT = 1e-6
REGRESSION_TOLERANCE = 1e-9
IMPROVEMENT_TOLERANCE = 1e-12
FERMAT_ITERATIONS = 500
STEINER_RATIO_REFERENCE = math.sqrt(3.0) / 2.0


class EventKind(str, Enum):
    """Kinds of recorded pipeline actions."""

    SLIDE_INHERENT = "slide_inherent"
    DETACH = "detach"
    RELAX_SNAPSHOT = "relax_snapshot"
    TOPOLOGY_SWAP = "topology_swap"
    COLLISION_MERGE = "collision_merge"
    ZERO_EDGE_FLICK = "zero_edge_flick"
    TILT = "tilt"


STRUCTURAL_KINDS = frozenset(
    {
        EventKind.SLIDE_INHERENT,
        EventKind.DETACH,
        EventKind.TOPOLOGY_SWAP,
        EventKind.COLLISION_MERGE,
        EventKind.ZERO_EDGE_FLICK,
    }
)


@dataclass(frozen=True)
class TraceEvent:
    """One recorded pipeline action."""

    step_index: int
    kind: EventKind
    payload: Mapping[str, Any]


@dataclass
class Trace:
    """Ordered events of a run plus tree snapshots keyed by phase name.

    Snapshot keys are ``wmst``, ``plane_wmst``, ``slide``, ``detach`` and
    ``final``; ``slide`` and ``detach`` hold the tree right after the last
    slide or detach step and are absent when the step never fired.
    """

    events: list[TraceEvent] = field(default_factory=list)
    snapshots: dict[str, PlaneTree] = field(default_factory=dict)

    def record(self, kind: EventKind, **payload: Any) -> TraceEvent:
        event = TraceEvent(step_index=len(self.events), kind=kind, payload=payload)
        self.events.append(event)
        logger.debug("#%d %s %s", event.step_index, kind.value, payload)
        return event

    def truncate(self, length: int) -> None:
        del self.events[length:]

    def of_kind(self, kind: EventKind) -> list[TraceEvent]:
        return [e for e in self.events if e.kind is kind]

    def counts(self) -> dict[str, int]:
        result = {kind.value: 0 for kind in EventKind}
        for event in self.events:
            result[event.kind.value] += 1
        return result


@dataclass(frozen=True)
class SolveReport:
    """Lengths, ratios and counters of one heuristic run."""

    terminal_count: int
    wmst_metrics: TreeMetrics
    plane_wmst_metrics: TreeMetrics
    final_metrics: TreeMetrics
    ratio_weighted: float
    ratio_euclidean: float
    event_counts: Mapping[str, int]
    iterations: int
    converged: bool
    steiner_count: int
    min_steiner_angle: Optional[float]
    max_weighted_gradient: float
    merge_events: int
    reverted_iterations: int
    selected_iteration: int
    planarity: tuple[PlanarityDiagnostic, ...]
    config: SolveConfig
    steiner_ratio_reference: float = STEINER_RATIO_REFERENCE

    @property
    def is_plane(self) -> bool:
        return not self.planarity


class SolveOutcome(NamedTuple):
    tree: PlaneTree
    report: SolveReport
    trace: Trace


# -- small geometric queries ---------------------------------------------


def _key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _angle(tree: PlaneTree, apex: int, a: int, b: int) -> Optional[float]:
    try:
        return angle_at(tree.pos(apex), tree.pos(a), tree.pos(b))
    except DegenerateAngleError:
        return None


def _acute_pairs(tree: PlaneTree, vertex_id: int) -> list[tuple[float, int, int]]:
    """Adjacent-edge pairs at a vertex sorted by angle, most acute first."""
    pairs = []
    for a, c in combinations(tree.neighbors(vertex_id), 2):
        angle = _angle(tree, vertex_id, a, c)
        if angle is not None:
            pairs.append((angle, a, c))
    pairs.sort()
    return pairs


def min_adjacent_angle(tree: PlaneTree, vertex_id: int) -> Optional[float]:
    """Smallest angle between two edges at a vertex.

    Returns None for vertices of degree below two and for vertices that
    coincide with one of their neighbours.
    """
    neighbors = tree.neighbors(vertex_id)
    if len(neighbors) < 2:
        return None
    smallest = math.inf
    for a, c in combinations(neighbors, 2):
        angle = _angle(tree, vertex_id, a, c)
        if angle is None:
            return None
        smallest = min(smallest, angle)
    return smallest


def _factor(steiner: WeightedVertex, other: WeightedVertex, cfg: SolveConfig) -> float:
    if cfg.relax_objective is RelaxObjective.SURFACE_TENSION:
        return 1.0
    return 0.5 * (steiner.weight + other.weight)


def _anchors(tree: PlaneTree, vertex_id: int, cfg: SolveConfig) -> list[tuple[Point, float]]:
    vertex = tree.vertex(vertex_id)
    return [
        (tree.pos(n), _factor(vertex, tree.vertex(n), cfg)) for n in tree.neighbors(vertex_id)
    ]


def _weighted_anchors(tree: PlaneTree, vertex_id: int) -> list[tuple[Point, float]]:
    vertex = tree.vertex(vertex_id)
    return [
        (tree.pos(n), 0.5 * (vertex.weight + tree.vertex(n).weight))
        for n in tree.neighbors(vertex_id)
    ]


def weighted_gradient(tree: PlaneTree, vertex_id: int) -> float:
    """Norm of the weighted-length subgradient at a vertex, relative to its factor sum."""
    vertex = tree.vertex(vertex_id)
    scale = max(tree.bounding_diagonal(), 1.0) * 1e-12
    pull_x = pull_y = resting = total = 0.0
    for n in tree.neighbors(vertex_id):
        other = tree.vertex(n)
        f = 0.5 * (vertex.weight + other.weight)
        total += f
        d = euclid_dist(vertex.pos, other.pos)
        if d <= scale:
            resting += f
        else:
            pull_x += f * (other.pos.x - vertex.pos.x) / d
            pull_y += f * (other.pos.y - vertex.pos.y) / d
    if total == 0.0:
        return 0.0
    return max(0.0, math.hypot(pull_x, pull_y) - resting) / total


def steiner_settled(tree: PlaneTree, vertex_id: int, cfg: SolveConfig) -> bool:
    """Whether a Steiner point is at rest under the configured objective."""
    if tree.degree(vertex_id) < 3:
        return False
    if cfg.relax_objective is RelaxObjective.SURFACE_TENSION:
        smallest = min_adjacent_angle(tree, vertex_id)
        return smallest is not None and smallest >= cfg.angle_threshold
    return weighted_gradient(tree, vertex_id) <= SETTLED_GRADIENT


def _crosses(tree: PlaneTree, segment: Segment, ignore: set[Edge]) -> bool:
    for edge, other in tree.iter_segments():
        if edge in ignore:
            continue
        if segments_cross(segment, other, shared_endpoint_ok=True):
            return True
    return False


def _segment_payload(tree: PlaneTree, edges: Sequence[Edge]) -> list[list[float]]:
    return [[*tree.pos(u).as_tuple(), *tree.pos(v).as_tuple()] for u, v in edges]


def _objective(tree: PlaneTree, cfg: SolveConfig) -> float:
    metrics = tree_metrics(tree)
    if cfg.relax_objective is RelaxObjective.SURFACE_TENSION:
        return metrics.euclidean_length
    return metrics.weighted_length


def _vertex_order(tree: PlaneTree) -> list[int]:
    return tree.terminal_ids() + sorted(tree.steiner_ids())


def _next_vertex(
    tree: PlaneTree, cfg: SolveConfig, done: set[int], eligible: Any
) -> Optional[int]:
    candidates = [v for v in _vertex_order(tree) if v not in done and eligible(v)]
    if not candidates:
        return None
    if cfg.ordering is Ordering.INPUT_ORDER:
        return candidates[0]

    def acuteness(v: int) -> tuple[float, int]:
        smallest = min_adjacent_angle(tree, v)
        return (math.inf if smallest is None else smallest, candidates.index(v))

    return min(candidates, key=acuteness)


# -- slide -----------------------------------------------------------------


def _try_slide(tree: PlaneTree, b: int, trace: Trace) -> bool:
    if tree.vertex(b).is_steiner:
        return False
    pairs = _acute_pairs(tree, b)
    if not pairs:
        return False
    angle_b, a, c = pairs[0]
    if angle_b >= STEINER_ANGLE:
        return False
    if tree.vertex(a).is_steiner or tree.vertex(c).is_steiner:
        return False
    angle_a = _angle(tree, a, b, c)
    angle_c = _angle(tree, c, a, b)
    if angle_a is None or angle_c is None:
        return False
    if max(angle_a, angle_c) < STEINER_ANGLE:
        return False

    drop = _key(a, b) if tree.length(a, b) >= tree.length(c, b) else _key(c, b)
    added = _key(a, c)
    if _crosses(tree, tree.segment(a, c), {drop}):
        return False
    old_cost = connection_cost(tree.vertex(drop[0]), tree.vertex(drop[1]))
    new_cost = connection_cost(tree.vertex(a), tree.vertex(c))
    if new_cost >= old_cost * (1.0 - IMPROVEMENT_TOLERANCE):
        return False

    removed_segments = _segment_payload(tree, [drop])
    tree.remove_edge(*drop)
    tree.add_edge(a, c)
    trace.record(
        EventKind.SLIDE_INHERENT,
        vertex=b,
        triangle=(a, b, c),
        inherent=c if angle_c >= angle_a else a,
        angle=angle_b,
        removed_edges=[drop],
        added_edges=[added],
        removed_segments=removed_segments,
        weighted_change=new_cost - old_cost,
    )
    return True


def slide_inherent(
    tree: PlaneTree, cfg: SolveConfig, trace: Optional[Trace] = None
) -> tuple[PlaneTree, list[TraceEvent]]:
    """Slide edge pairs onto inherent Steiner points until none is left.

    For each terminal ``B`` in processing order, the most acute pair of
    adjacent edges ``BA``, ``BC`` is examined. When ``A``, ``B`` and ``C``
    are terminals, the angle at ``B`` is below 120 degrees and the angle at
    ``A`` or ``C`` is at least 120 degrees, the longer of ``AB`` and ``CB``
    is replaced by ``AC``. A slide is skipped when ``AC`` would cross an
    edge. It is also skipped when the connection cost of ``AC`` is not
    strictly below that of the dropped edge; with weights this guard can
    veto a geometrically valid slide, and it keeps every slide from
    raising the weighted length.

    Args:
        tree: A plane spanning tree; it is not modified.
        cfg: Solver configuration (only the ordering is used).
        trace: Trace receiving the events; a private one is used if omitted.

    Returns:
        The new tree and the events recorded by this call.
    """
    trace = Trace() if trace is None else trace
    start = len(trace.events)
    work = tree.copy()
    for _ in range(len(work) ** 2 + 1):
        done: set[int] = set()
        slid = False
        while True:
            b = _next_vertex(work, cfg, done, lambda v: work.degree(v) >= 2)
            if b is None:
                break
            done.add(b)
            slid = _try_slide(work, b, trace) or slid
        if not slid:
            break
    return work, trace.events[start:]


# -- detach ----------------------------------------------------------------


def _try_detach(
    tree: PlaneTree,
    b: int,
    cfg: SolveConfig,
    trace: Trace,
    blacklist: frozenset[tuple[int, int, int]],
) -> Optional[int]:
    if tree.vertex(b).is_steiner and steiner_settled(tree, b, cfg):
        return None
    for angle, a, c in _acute_pairs(tree, b):
        if angle >= cfg.angle_threshold:
            break
        if (b, a, c) in blacklist:
            continue
        pa, pb, pc = tree.pos(a), tree.pos(b), tree.pos(c)
        try:
            fermat = fermat_point(pa, pb, pc)
        except DegenerateTriangleError:
            continue
        if fermat.inherent:
            continue
        s = fermat.point
        removed = [_key(a, b), _key(c, b)]
        ignore = set(removed)
        if any(_crosses(tree, Segment(p, s), ignore) for p in (pa, pb, pc)):
            continue

        weight = min(tree.vertex(a).weight, tree.vertex(b).weight, tree.vertex(c).weight)
        removed_segments = _segment_payload(tree, removed)
        steiner = tree.add_steiner(s, weight)
        tree.remove_edge(a, b)
        tree.remove_edge(c, b)
        for n in (a, b, c):
            tree.add_edge(n, steiner.id)
        trace.record(
            EventKind.DETACH,
            vertex=b,
            neighbors=(a, c),
            angle=angle,
            steiner=steiner.id,
            position=s.as_tuple(),
            weight=weight,
            removed_edges=removed,
            added_edges=[_key(n, steiner.id) for n in (a, b, c)],
            removed_segments=removed_segments,
        )
        return steiner.id
    return None


def detach_steiner(
    tree: PlaneTree,
    cfg: SolveConfig,
    trace: Optional[Trace] = None,
    *,
    limit: Optional[int] = None,
    blacklist: frozenset[tuple[int, int, int]] = frozenset(),
) -> tuple[PlaneTree, list[TraceEvent]]:
    """Detach Steiner points from vertices with acute adjacent edges.

    Each vertex ``B`` is visited once per call, in the configured order;
    its most acute adjacent pair ``(A, C)`` with an angle below the
    tolerance threshold gets a Steiner point ``S`` at the Fermat point of
    ``ABC`` with weight ``min(w(A), w(B), w(C))``, and ``AB``, ``CB`` are
    replaced by ``AS``, ``BS``, ``CS``. Pairs whose Fermat point is
    inherent, whose new edges would cross the tree, or whose ``(B, A, C)``
    triple is blacklisted are passed over in favour of the next pair.

    Args:
        tree: A spanning tree; it is not modified.
        cfg: Solver configuration.
        trace: Trace receiving the events.
        limit: Stop after this many detachments.
        blacklist: ``(B, A, C)`` triples never to detach, ``A < C``.

    Returns:
        The new tree and the events recorded by this call.
    """
    trace = Trace() if trace is None else trace
    start = len(trace.events)
    work = tree.copy()
    done: set[int] = set()
    created = 0
    while limit is None or created < limit:
        b = _next_vertex(work, cfg, done, lambda v: work.degree(v) >= 2)
        if b is None:
            break
        done.add(b)
        steiner = _try_detach(work, b, cfg, trace, blacklist)
        if steiner is not None:
            done.add(steiner)
            created += 1
    return work, trace.events[start:]


# -- relax -----------------------------------------------------------------


def _move_to_optimum(tree: PlaneTree, vertex_id: int, cfg: SolveConfig, guarded: bool) -> None:
    anchors = _anchors(tree, vertex_id, cfg)
    if not anchors:
        return
    current = tree.pos(vertex_id)
    before = weighted_distance_sum(current, anchors)
    candidate: Optional[Point] = None
    if cfg.relax_objective is RelaxObjective.SURFACE_TENSION and len(anchors) == 3:
        try:
            candidate = fermat_point(*(p for p, _ in anchors)).point
        except DegenerateTriangleError:
            candidate = None
    if candidate is None:
        candidate = weighted_fermat_point(
            anchors, current, max_iterations=FERMAT_ITERATIONS
        ).point
    if weighted_distance_sum(candidate, anchors) >= before:
        return
    if not guarded:
        tree.move(vertex_id, candidate)
        return

    # Halve the step until the incident weighted length does not grow.
    costs = _weighted_anchors(tree, vertex_id)
    limit = weighted_distance_sum(current, costs)
    for _ in range(RELAX_BACKTRACKS):
        if weighted_distance_sum(candidate, costs) <= limit:
            tree.move(vertex_id, candidate)
            return
        candidate = midpoint(current, candidate)


def _sweeps(tree: PlaneTree, cfg: SolveConfig, guarded: bool = False) -> tuple[list[float], bool]:
    steiners = sorted(tree.steiner_ids())
    current = _objective(tree, cfg)
    lengths = [current]
    if not steiners:
        return lengths, True
    for _ in range(cfg.relax_step_cap):
        for sid in steiners:
            _move_to_optimum(tree, sid, cfg, guarded)
        new = _objective(tree, cfg)
        lengths.append(new)
        decrease = current - new
        current = new
        if decrease <= cfg.relax_tolerance * max(new, 1e-300):
            return lengths, True
    return lengths, False


def _stagnating_edge(tree: PlaneTree, cfg: SolveConfig) -> Optional[Edge]:
    threshold = cfg.collision_epsilon * tree.bounding_diagonal()
    for u, v in tree.edges():
        if not (tree.vertex(u).is_steiner and tree.vertex(v).is_steiner):
            continue
        if tree.length(u, v) <= threshold:
            continue
        if not (steiner_settled(tree, u, cfg) and steiner_settled(tree, v, cfg)):
            return (u, v)
    return None


class _Tilt(NamedTuple):
    edge: Edge
    kept: bool
    length_before: float
    length_after: float


def _relax_pass(
    work: PlaneTree, cfg: SolveConfig, guarded: bool
) -> tuple[list[float], bool, Optional[_Tilt]]:
    lengths, converged = _sweeps(work, cfg, guarded)
    if cfg.tilt_degrees <= 0:
        return lengths, converged, None
    edge = _stagnating_edge(work, cfg)
    if edge is None:
        return lengths, converged, None

    u, v = edge
    saved = {sid: work.pos(sid) for sid in work.steiner_ids()}
    untilted = tree_metrics(work).weighted_length
    centre = midpoint(work.pos(u), work.pos(v))
    work.move(u, rotate_about(work.pos(u), centre, -cfg.tilt_degrees))
    work.move(v, rotate_about(work.pos(v), centre, -cfg.tilt_degrees))
    tilted, tilted_converged = _sweeps(work, cfg, guarded)
    kept = tilted[-1] <= lengths[-1]
    if guarded:
        kept = kept and tree_metrics(work).weighted_length <= untilted
    tilt = _Tilt(edge, kept, lengths[-1], tilted[-1])
    if kept:
        lengths.append(tilted[-1])
        converged = tilted_converged
    else:
        for sid, pos in saved.items():
            work.move(sid, pos)
    return lengths, converged, tilt


def relax(
    tree: PlaneTree, cfg: SolveConfig, trace: Optional[Trace] = None
) -> tuple[PlaneTree, list[TraceEvent]]:
    """Move Steiner points to a local minimum with terminals held fixed.

    Each sweep moves every Steiner point, in id order, to the minimiser of
    its factor-weighted distance sum to its neighbours. Sweeps stop once a
    sweep lowers the minimised length by less than ``relax_tolerance`` of
    its value, or after ``relax_step_cap`` sweeps. If afterwards a
    Steiner-Steiner edge still has an unsettled endpoint, it is tilted
    clockwise by ``tilt_degrees`` about its midpoint and relaxed again;
    the tilt is kept only if it ends no longer than before.

    Under the surface-tension objective the unit factors can pull a light
    Steiner point away from a heavy neighbour. When the relaxed tree ends
    up longer in weighted length than it started, relaxation restarts from
    the original positions with every move halved until the weighted
    length of the point's edges does not grow. Either way the weighted
    length never increases.

    The single RELAX_SNAPSHOT event lists the minimised length after every
    kept sweep (non-increasing) together with the weighted and Euclidean
    tree lengths before and after, the ``converged`` flag and whether the
    weighted guard was needed.
    """
    trace = Trace() if trace is None else trace
    start = len(trace.events)
    work = tree.copy()
    if not work.steiner_ids():
        return work, []

    before = tree_metrics(work)
    lengths, converged, tilt = _relax_pass(work, cfg, guarded=False)
    guarded = (
        cfg.relax_objective is RelaxObjective.SURFACE_TENSION
        and tree_metrics(work).weighted_length > before.weighted_length
    )
    if guarded:
        logger.debug(
            "Unit-factor relaxation lengthened the weighted tree; relaxing with the weighted guard"
        )
        work = tree.copy()
        lengths, converged, tilt = _relax_pass(work, cfg, guarded=True)

    if tilt is not None:
        trace.record(
            EventKind.TILT,
            edge=tilt.edge,
            degrees=cfg.tilt_degrees,
            kept=tilt.kept,
            length_before=tilt.length_before,
            length_after=tilt.length_after,
        )
    after = tree_metrics(work)
    trace.record(
        EventKind.RELAX_SNAPSHOT,
        objective=cfg.relax_objective.value,
        sweeps=len(lengths) - 1,
        lengths=lengths,
        converged=converged,
        weighted_guard=guarded,
        weighted_before=before.weighted_length,
        weighted_after=after.weighted_length,
        euclidean_before=before.euclidean_length,
        euclidean_after=after.euclidean_length,
        positions={sid: work.pos(sid).as_tuple() for sid in sorted(work.steiner_ids())},
    )
    if not converged:
        logger.warning("Relaxation stopped at the cap of %d sweeps", cfg.relax_step_cap)
    return work, trace.events[start:]


# -- flick -----------------------------------------------------------------


def _merge_into_terminal(
    tree: PlaneTree, steiner_id: int, terminal_id: int, cfg: SolveConfig, trace: Trace
) -> None:
    steiner = tree.vertex(steiner_id)
    terminal = tree.vertex(terminal_id)
    moved = [n for n in tree.neighbors(steiner_id) if n != terminal_id]
    tree.remove_vertex(steiner_id)
    for n in moved:
        tree.add_edge(terminal_id, n)
    weight_after = terminal.weight
    if cfg.merge_policy is MergePolicy.TERMINAL_ADOPTS_STEINER_WEIGHT:
        weight_after = steiner.weight
        tree.update_vertex(terminal.with_weight(weight_after))
    trace.record(
        EventKind.COLLISION_MERGE,
        steiner=steiner_id,
        terminal=terminal_id,
        steiner_weight=steiner.weight,
        terminal_weight_before=terminal.weight,
        terminal_weight_after=weight_after,
        policy=cfg.merge_policy.value,
        reattached=moved,
    )


def _contract_steiner_pair(tree: PlaneTree, u: int, v: int, trace: Trace) -> None:
    keep, gone = (u, v) if u < v else (v, u)
    kept = tree.vertex(keep)
    other = tree.vertex(gone)
    moved = [n for n in tree.neighbors(gone) if n != keep]
    tree.remove_vertex(gone)
    for n in moved:
        tree.add_edge(keep, n)
    merged = kept.moved_to(midpoint(kept.pos, other.pos)).with_weight(
        min(kept.weight, other.weight)
    )
    tree.update_vertex(merged)
    trace.record(
        EventKind.ZERO_EDGE_FLICK,
        action="contract",
        kept=keep,
        removed=gone,
        position=merged.pos.as_tuple(),
        weight=merged.weight,
        degree=tree.degree(keep),
    )


def _merge_collisions(tree: PlaneTree, cfg: SolveConfig, trace: Trace) -> bool:
    """Merge one Steiner point lying within the collision distance of an adjacent terminal."""
    threshold = cfg.collision_epsilon * tree.bounding_diagonal()
    for u, v in tree.edges():
        su, sv = tree.vertex(u).is_steiner, tree.vertex(v).is_steiner
        if su == sv or tree.length(u, v) >= threshold:
            continue
        steiner, terminal = (u, v) if su else (v, u)
        _merge_into_terminal(tree, steiner, terminal, cfg, trace)
        return True
    return False


def _flick_once(tree: PlaneTree, cfg: SolveConfig, trace: Trace) -> bool:
    if _merge_collisions(tree, cfg, trace):
        return True
    threshold = cfg.collision_epsilon * tree.bounding_diagonal()
    for u, v in tree.edges():
        if tree.vertex(u).is_steiner and tree.vertex(v).is_steiner:
            if tree.length(u, v) < threshold:
                _contract_steiner_pair(tree, u, v, trace)
                return True

    for sid in sorted(tree.steiner_ids()):
        degree = tree.degree(sid)
        if degree <= 1:
            tree.remove_vertex(sid)
            trace.record(EventKind.ZERO_EDGE_FLICK, action="prune", removed=sid)
            return True
        if degree == 2:
            a, c = tree.neighbors(sid)
            angle = _angle(tree, sid, a, c)
            if angle is None or angle >= SPLICE_ANGLE:
                tree.remove_vertex(sid)
                tree.add_edge(a, c)
                trace.record(
                    EventKind.ZERO_EDGE_FLICK,
                    action="splice",
                    removed=sid,
                    added_edges=[_key(a, c)],
                )
                return True
    return False


def flick_zero_edges(
    tree: PlaneTree, cfg: SolveConfig, trace: Optional[Trace] = None
) -> tuple[PlaneTree, list[TraceEvent]]:
    """Contract vanishing edges and tidy up Steiner points that lost their role.

    Edges shorter than ``collision_epsilon`` times the terminals'
    bounding-box diagonal are contracted: a Steiner point merges into an
    adjacent terminal (COLLISION_MERGE, weight per ``merge_policy``) and
    two Steiner points merge at their midpoint with the smaller weight
    (ZERO_EDGE_FLICK). Degree-2 Steiner points whose two edges are
    straight within 0.1 degrees are spliced out and leaf Steiner points
    are pruned.
    """
    trace = Trace() if trace is None else trace
    start = len(trace.events)
    work = tree.copy()
    while _flick_once(work, cfg, trace):
        pass
    return work, trace.events[start:]


# -- topology rule -----------------------------------------------------------


def _collapsing_segments(tree: PlaneTree, s1: int, s2: int, cfg: SolveConfig) -> int:
    """Count segments ``P S_j`` with ``|S1 S2| / |P S_j|`` below the topology bound."""
    inner = tree.length(s1, s2)
    count = 0
    for s, other in ((s1, s2), (s2, s1)):
        for p in tree.neighbors(s):
            if p == other:
                continue
            outer = tree.length(p, s)
            if outer > 0.0 and inner < cfg.topology_bound * outer:
                count += 1
    return count


def _seed(
    tree: PlaneTree, pair: Sequence[int], far: Point, weight: float, cfg: SolveConfig
) -> Point:
    a, c = (tree.vertex(n) for n in pair)
    if cfg.relax_objective is RelaxObjective.SURFACE_TENSION:
        fa = fc = ff = 1.0
    else:
        fa, fc, ff = 0.5 * (a.weight + weight), 0.5 * (c.weight + weight), weight
    anchors = [(a.pos, fa), (c.pos, fc), (far, ff)]
    start = Point((a.pos.x + c.pos.x + far.x) / 3.0, (a.pos.y + c.pos.y + far.y) / 3.0)
    return weighted_fermat_point(anchors, start, max_iterations=FERMAT_ITERATIONS).point


def _try_swap(
    tree: PlaneTree, s1: int, s2: int, cfg: SolveConfig
) -> Optional[tuple[PlaneTree, tuple[tuple[int, int], tuple[int, int]]]]:
    outer1 = [n for n in tree.neighbors(s1) if n != s2]
    outer2 = [n for n in tree.neighbors(s2) if n != s1]
    centre = midpoint(tree.pos(s1), tree.pos(s2))

    def bearing(n: int) -> tuple[float, int]:
        p = tree.pos(n)
        return (math.atan2(p.y - centre.y, p.x - centre.x), n)

    ring = sorted(outer1 + outer2, key=bearing)
    current = {frozenset(outer1), frozenset(outer2)}
    weight = min(tree.vertex(s1).weight, tree.vertex(s2).weight)
    baseline = tree_metrics(tree).weighted_length
    baseline_crossings = len(crossing_pairs(tree))

    best: Optional[tuple[float, PlaneTree, tuple[tuple[int, int], tuple[int, int]]]] = None
    for first, second in (((0, 1), (2, 3)), ((1, 2), (3, 0))):
        pair1 = (ring[first[0]], ring[first[1]])
        pair2 = (ring[second[0]], ring[second[1]])
        if {frozenset(pair1), frozenset(pair2)} == current:
            continue
        trial = tree.copy()
        for n in outer1:
            trial.remove_edge(s1, n)
        for n in outer2:
            trial.remove_edge(s2, n)
        seed1 = _seed(trial, pair1, midpoint(trial.pos(pair2[0]), trial.pos(pair2[1])), weight, cfg)
        seed2 = _seed(trial, pair2, midpoint(trial.pos(pair1[0]), trial.pos(pair1[1])), weight, cfg)
        trial.update_vertex(trial.vertex(s1).moved_to(seed1).with_weight(weight))
        trial.update_vertex(trial.vertex(s2).moved_to(seed2).with_weight(weight))
        for n in pair1:
            trial.add_edge(s1, n)
        for n in pair2:
            trial.add_edge(s2, n)
        _sweeps(trial, cfg)
        if len(crossing_pairs(trial)) > baseline_crossings:
            continue
        length = tree_metrics(trial).weighted_length
        if best is None or length < best[0]:
            best = (length, trial, (pair1, pair2))

    if best is None or best[0] >= baseline * (1.0 - IMPROVEMENT_TOLERANCE):
        return None
    return best[1], best[2]


def _split_high_degree(tree: PlaneTree, sid: int, cfg: SolveConfig) -> Optional[PlaneTree]:
    centre = tree.pos(sid)
    neighbors = sorted(
        tree.neighbors(sid),
        key=lambda n: (math.atan2(tree.pos(n).y - centre.y, tree.pos(n).x - centre.x), n),
    )
    baseline_crossings = len(crossing_pairs(tree))
    best: Optional[tuple[tuple[float, float], PlaneTree]] = None
    for i, a in enumerate(neighbors):
        c = neighbors[(i + 1) % len(neighbors)]
        trial = tree.copy()
        pa, pc = trial.pos(a), trial.pos(c)
        seed = Point((pa.x + pc.x + centre.x) / 3.0, (pa.y + pc.y + centre.y) / 3.0)
        weight = min(trial.vertex(a).weight, trial.vertex(c).weight, trial.vertex(sid).weight)
        peeled = trial.add_steiner(seed, weight)
        trial.remove_edge(sid, a)
        trial.remove_edge(sid, c)
        for n in (a, c, sid):
            trial.add_edge(peeled.id, n)
        _sweeps(trial, cfg)
        if len(crossing_pairs(trial)) > baseline_crossings:
            continue
        score = (_objective(trial, cfg), tree_metrics(trial).weighted_length)
        if best is None or score < best[0]:
            best = (score, trial)
    return None if best is None else best[1]


def apply_topology_rule(
    tree: PlaneTree,
    cfg: SolveConfig,
    trace: Optional[Trace] = None,
    *,
    hold: frozenset[int] = frozenset(),
) -> tuple[PlaneTree, list[TraceEvent], bool]:
    """Repair collapsing Steiner-Steiner edges and overloaded junctions.

    A Steiner-Steiner edge ``S1 S2`` whose length is below ``sqrt(3) - 1``
    times (less a small margin) at least three of its four adjacent
    segments ``P S_j`` has its four outer neighbours re-paired across the
    edge in the other crossing-free way. The two Steiner points are
    re-seeded at the weighted Fermat points of each new pair and the far
    pair's midpoint, then relaxed. The swap is kept only when it lowers
    the weighted length. Steiner points of degree four or more are split
    by peeling off each angularly adjacent neighbour pair in turn and
    keeping the shortest relaxed result. Steiner points that collided
    with an adjacent terminal are merged into it first. Steiner points in
    ``hold`` are neither split nor swapped.

    Returns:
        The new tree, the events recorded, and whether the tree changed.
    """
    trace = Trace() if trace is None else trace
    start = len(trace.events)
    work = tree.copy()
    changed = False

    while _merge_collisions(work, cfg, trace):
        changed = True

    for sid in sorted(work.steiner_ids()):
        if sid in hold:
            continue
        while sid in work and work.degree(sid) >= 4:
            degree = work.degree(sid)
            split = _split_high_degree(work, sid, cfg)
            if split is None:
                logger.warning("Steiner point %d of degree %d could not be split", sid, degree)
                break
            peeled = max(split.steiner_ids())
            work = split
            changed = True
            trace.record(
                EventKind.TOPOLOGY_SWAP,
                action="split",
                steiner=sid,
                degree_before=degree,
                peeled=peeled,
                neighbors=tuple(work.neighbors(peeled)),
            )

    for s1, s2 in work.edges():
        if not (s1 in work and s2 in work and work.has_edge(s1, s2)):
            continue
        if not (work.vertex(s1).is_steiner and work.vertex(s2).is_steiner):
            continue
        if work.degree(s1) != 3 or work.degree(s2) != 3:
            continue
        if s1 in hold or s2 in hold:
            continue
        collapsing = _collapsing_segments(work, s1, s2, cfg)
        if collapsing < 3:
            continue
        ratio_edge = work.length(s1, s2)
        before = tree_metrics(work).weighted_length
        swapped = _try_swap(work, s1, s2, cfg)
        if swapped is None:
            logger.debug("Swap of edge (%d, %d) rejected: no shorter re-pairing", s1, s2)
            continue
        work, (pair1, pair2) = swapped
        changed = True
        trace.record(
            EventKind.TOPOLOGY_SWAP,
            action="swap",
            edge=(s1, s2),
            edge_length=ratio_edge,
            collapsing_segments=collapsing,
            pairs=(pair1, pair2),
            weighted_before=before,
            weighted_after=tree_metrics(work).weighted_length,
        )

    return work, trace.events[start:], changed


# -- solve -----------------------------------------------------------------


class _Iteration(NamedTuple):
    tree: PlaneTree
    structural: int
    merges: int
    cleanups: int
    detached: list[tuple[int, int, int]]
    repaired: frozenset[int]
    relax_converged: bool


class _Settled(NamedTuple):
    """Shortest settled tree so far and the trace position that produced it."""

    weighted: float
    tree: PlaneTree
    merges: int
    mark: int
    snapshots: dict[str, PlaneTree]
    iteration: int


def _repaired_steiners(event: TraceEvent) -> set[int]:
    if event.payload["action"] == "split":
        return {event.payload["steiner"], event.payload["peeled"]}
    return set(event.payload["edge"])


def _iterate(
    tree: PlaneTree,
    cfg: SolveConfig,
    trace: Trace,
    blacklist: frozenset[tuple[int, int, int]],
    detach_limit: Optional[int],
    hold: frozenset[int],
) -> _Iteration:
    work, slides = slide_inherent(tree, cfg, trace)
    if slides:
        trace.snapshots["slide"] = work.copy()
    work, detaches = detach_steiner(work, cfg, trace, limit=detach_limit, blacklist=blacklist)
    if detaches:
        trace.snapshots["detach"] = work.copy()
    work, relax_events = relax(work, cfg, trace)
    work, flicks = flick_zero_edges(work, cfg, trace)
    work, repairs, _ = apply_topology_rule(work, cfg, trace, hold=hold)

    events = slides + detaches + flicks + repairs
    snapshots = [e for e in relax_events if e.kind is EventKind.RELAX_SNAPSHOT]
    repaired: set[int] = set()
    for e in repairs:
        if e.kind is EventKind.TOPOLOGY_SWAP:
            repaired |= _repaired_steiners(e)
    return _Iteration(
        tree=work,
        structural=sum(1 for e in events if e.kind in STRUCTURAL_KINDS),
        merges=sum(1 for e in events if e.kind is EventKind.COLLISION_MERGE),
        cleanups=sum(
            1
            for e in events
            if e.kind is EventKind.COLLISION_MERGE
            or (e.kind is EventKind.ZERO_EDGE_FLICK and e.payload["action"] != "prune")
        ),
        detached=[(e.payload["vertex"], *e.payload["neighbors"]) for e in detaches],
        repaired=frozenset(repaired),
        relax_converged=all(e.payload["converged"] for e in snapshots),
    )


def _all_settled(tree: PlaneTree, cfg: SolveConfig) -> bool:
    return all(
        tree.degree(s) == 3 and steiner_settled(tree, s, cfg) for s in tree.steiner_ids()
    )


def _initial_tree(initial: PlaneTree, terminals: Sequence[WeightedVertex]) -> PlaneTree:
    if not initial.is_spanning_tree():
        msg = "Initial tree must be a spanning tree"
        raise ValueError(msg)
    if sorted(initial.terminal_ids()) != sorted(v.id for v in terminals):
        msg = "Initial tree must contain exactly the given terminals"
        raise ValueError(msg)
    return initial.copy()


def _ratio(final: float, start: float) -> float:
    return final / start if start > 0 else 1.0


def solve(
    terminals: Sequence[WeightedVertex],
    cfg: Optional[SolveConfig] = None,
    *,
    initial_tree: Optional[PlaneTree] = None,
) -> SolveOutcome:
    """Run the soap-film heuristic on a set of terminals.

    An iteration that introduces a crossing, or lengthens the tree without
    a merge or splice, is undone: its detaches are retried one at a time
    and then blacklisted, and the Steiner points of its topology repairs
    are held. The returned tree is the weighted-shortest of the start tree
    and the accepted trees whose Steiner points were all settled, so it is
    never longer than the start. The trace is cut back to the events that
    produced it. ``converged`` is false only when the iteration cap was
    reached or a lengthening iteration left nothing to undo.

    Args:
        terminals: Terminals in insertion order, pairwise distinct positions.
        cfg: Solver configuration; defaults to ``SolveConfig()``.
        initial_tree: Optional starting tree replacing the plane WMST, for
            example to begin from a chosen topology.

    Returns:
        ``SolveOutcome(tree, report, trace)``.

    Raises:
        DuplicateTerminalError: If two terminals share a position.
        InfeasiblePlaneTreeError: If no plane WMST can be grown.
        ValueError: If ``terminals`` is empty or ``initial_tree`` is invalid.

    Example:
        >>> from soapfilm.domain.families import triangle_corners
        >>> outcome = solve(triangle_corners())
        >>> round(outcome.report.final_metrics.euclidean_length, 5)
        3.4641
    """
    cfg = SolveConfig() if cfg is None else cfg
    terminals = list(terminals)
    if not terminals:
        msg = "At least one terminal is required"
        raise ValueError(msg)

    trace = Trace()
    wmst_tree = weighted_mst(terminals)
    if initial_tree is None:
        start_tree = plane_weighted_mst(terminals)
    else:
        start_tree = _initial_tree(initial_tree, terminals)
    trace.snapshots["wmst"] = wmst_tree
    trace.snapshots["plane_wmst"] = start_tree.copy()
    start_metrics = tree_metrics(start_tree)
    logger.info(
        "Plane WMST over %d terminals: weighted %.6f, euclidean %.6f",
        len(terminals),
        start_metrics.weighted_length,
        start_metrics.euclidean_length,
    )

    cap = cfg.iteration_cap(len(terminals))
    work = start_tree
    best = _Settled(
        start_metrics.weighted_length, start_tree.copy(), 0, 0, dict(trace.snapshots), 0
    )
    blacklist: set[tuple[int, int, int]] = set()
    hold: set[int] = set()
    detach_limit: Optional[int] = None
    iterations = reverted = merges = 0
    converged = False

    while iterations < cap:
        iterations += 1
        mark = len(trace.events)
        saved_snapshots = dict(trace.snapshots)
        before_weighted = tree_metrics(work).weighted_length
        before_crossings = len(crossing_pairs(work))

        step = _iterate(work, cfg, trace, frozenset(blacklist), detach_limit, frozenset(hold))

        after_weighted = tree_metrics(step.tree).weighted_length
        longer = after_weighted > before_weighted * (1.0 + REGRESSION_TOLERANCE) + 1e-12
        crossed = len(crossing_pairs(step.tree)) > before_crossings
        if crossed or (longer and not step.cleanups):
            trace.truncate(mark)
            trace.snapshots = saved_snapshots
            reverted += 1
            reason = "introduced a crossing" if crossed else "lengthened the tree"
            if len(step.detached) > 1:
                detach_limit = 1
                logger.warning("Iteration %d %s; retrying one detach at a time", iterations, reason)
                continue
            if len(step.detached) == 1:
                blacklist.add(step.detached[0])
                logger.warning(
                    "Iteration %d %s; detach %s blacklisted", iterations, reason, step.detached[0]
                )
                continue
            if step.repaired - hold:
                hold |= step.repaired
                logger.warning(
                    "Iteration %d %s; topology repairs at %s held",
                    iterations,
                    reason,
                    sorted(step.repaired),
                )
                continue
            logger.warning("Iteration %d %s with nothing to undo; stopping", iterations, reason)
            break

        work = step.tree
        merges += step.merges
        logger.debug(
            "Iteration %d: %d structural events, weighted %.6f",
            iterations,
            step.structural,
            after_weighted,
        )
        if _all_settled(work, cfg) and after_weighted <= best.weighted:
            best = _Settled(
                after_weighted,
                work.copy(),
                merges,
                len(trace.events),
                dict(trace.snapshots),
                iterations,
            )
        if step.structural == 0 and (step.relax_converged or _all_settled(work, cfg)):
            converged = True
            break

    if best.mark < len(trace.events):
        logger.info(
            "Returning the shortest settled tree, reached in iteration %d", best.iteration
        )
        trace.truncate(best.mark)
        trace.snapshots = dict(best.snapshots)
    work = best.tree
    merges = best.merges

    trace.snapshots["final"] = work.copy()
    report = _report(
        terminals,
        wmst_tree,
        start_tree,
        work,
        trace,
        cfg,
        iterations=iterations,
        converged=converged,
        merges=merges,
        reverted=reverted,
        selected=best.iteration,
    )
    if not converged:
        logger.warning("Heuristic did not converge after %d iterations", iterations)
    if report.planarity:
        logger.warning("Final tree has %d crossing edge pairs", len(report.planarity))
    logger.info(
        "Solved: weighted %.6f (ratio %.4f), euclidean %.6f (ratio %.4f), %d Steiner points",
        report.final_metrics.weighted_length,
        report.ratio_weighted,
        report.final_metrics.euclidean_length,
        report.ratio_euclidean,
        report.steiner_count,
    )
    return SolveOutcome(tree=work, report=report, trace=trace)


def _report(
    terminals: Sequence[WeightedVertex],
    wmst_tree: PlaneTree,
    start_tree: PlaneTree,
    final: PlaneTree,
    trace: Trace,
    cfg: SolveConfig,
    *,
    iterations: int,
    converged: bool,
    merges: int,
    reverted: int,
    selected: int,
) -> SolveReport:
    start_metrics = tree_metrics(start_tree)
    final_metrics = tree_metrics(final)
    steiners = final.steiner_ids()
    angles = [min_adjacent_angle(final, s) for s in steiners]
    min_angle = None
    if angles:
        min_angle = min(0.0 if a is None else a for a in angles)
    gradient = max((weighted_gradient(final, s) for s in steiners), default=0.0)
    return SolveReport(
        terminal_count=len(terminals),
        wmst_metrics=tree_metrics(wmst_tree),
        plane_wmst_metrics=start_metrics,
        final_metrics=final_metrics,
        ratio_weighted=_ratio(final_metrics.weighted_length, start_metrics.weighted_length),
        ratio_euclidean=_ratio(final_metrics.euclidean_length, start_metrics.euclidean_length),
        event_counts=trace.counts(),
        iterations=iterations,
        converged=converged,
        steiner_count=len(steiners),
        min_steiner_angle=min_angle,
        max_weighted_gradient=gradient,
        merge_events=merges,
        reverted_iterations=reverted,
        selected_iteration=selected,
        planarity=tuple(crossing_pairs(final)),
        config=cfg,
    )
