"""Planar primitives for weighted Steiner trees.

Distances, connection costs, angles, segment contact tests, and the
(weighted) Fermat-Torricelli point of a vertex and its neighbours.
All functions are pure and operate on immutable value types.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from soapfilm.domain.errors import (
    DegenerateAngleError,
    DegenerateTriangleError,
    GeometryError,
    WeightError,
)

__all__ = [
    "FermatResult",
    "Point",
    "Segment",
    "VertexKind",
    "WeightedFermatResult",
    "WeightedVertex",
    "angle_at",
    "connection_cost",
    "euclid_dist",
    "fermat_point",
    "midpoint",
    "orientation",
    "rotate_about",
    "segments_cross",
    "weighted_distance_sum",
    "weighted_fermat_point",
]

ORIENTATION_EPSILON = 1e-9
ANCHOR_SNAP_DISTANCE = 1e-12
INHERENT_ANGLE_DEGREES = 120.0


@dataclass(frozen=True)
class Point:
    """A point of the plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            msg = f"Point coordinates must be finite, got ({self.x}, {self.y})"
            raise GeometryError(msg)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


class VertexKind(str, Enum):
    """Whether a vertex is a given terminal or an inserted Steiner point."""

    TERMINAL = "terminal"
    STEINER = "steiner"


@dataclass(frozen=True)
class WeightedVertex:
    """A terminal or Steiner point with a positive weight.

    Example:
        >>> v = WeightedVertex(0, Point(0.0, 0.0), 7.0)
        >>> v.is_steiner
        False
    """

    id: int
    pos: Point
    weight: float
    kind: VertexKind = VertexKind.TERMINAL

    def __post_init__(self) -> None:
        if not (math.isfinite(self.weight) and self.weight > 0):
            msg = f"Vertex {self.id} weight must be a finite positive number, got {self.weight}"
            raise WeightError(msg)

    @property
    def is_steiner(self) -> bool:
        return self.kind is VertexKind.STEINER

    def moved_to(self, pos: Point) -> WeightedVertex:
        return replace(self, pos=pos)

    def with_weight(self, weight: float) -> WeightedVertex:
        return replace(self, weight=weight)


@dataclass(frozen=True)
class Segment:
    """A closed straight segment; ``a == b`` is allowed."""

    a: Point
    b: Point


@dataclass(frozen=True)
class FermatResult:
    """Fermat-Torricelli point of a triangle.

    ``inherent`` is set when the point is one of the corners, namely the
    corner whose interior angle is at least 120 degrees.
    """

    point: Point
    inherent: bool
    inherent_vertex: Optional[int] = None


@dataclass(frozen=True)
class WeightedFermatResult:
    """Outcome of the weighted Fermat descent for one movable vertex."""

    point: Point
    objective: float
    iterations: int
    converged: bool


def euclid_dist(p: Point, q: Point) -> float:
    """Return the Euclidean distance between ``p`` and ``q``."""
    return math.hypot(p.x - q.x, p.y - q.y)


def connection_cost(u: WeightedVertex, v: WeightedVertex) -> float:
    """Return the connection cost ``(w_u + w_v) / 2 * |u - v|``."""
    return 0.5 * (u.weight + v.weight) * euclid_dist(u.pos, v.pos)


def midpoint(p: Point, q: Point) -> Point:
    return Point(0.5 * (p.x + q.x), 0.5 * (p.y + q.y))


def rotate_about(p: Point, centre: Point, degrees: float) -> Point:
    """Rotate ``p`` counterclockwise about ``centre``; negative degrees turn clockwise."""
    theta = math.radians(degrees)
    dx, dy = p.x - centre.x, p.y - centre.y
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return Point(centre.x + cos_t * dx - sin_t * dy, centre.y + sin_t * dx + cos_t * dy)


def orientation(a: Point, b: Point, c: Point) -> float:
    """Twice the signed area of triangle abc; positive when counterclockwise."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def angle_at(apex: Point, a: Point, b: Point) -> float:
    """Return the interior angle at ``apex`` between rays to ``a`` and ``b``, in degrees.

    Raises:
        DegenerateAngleError: If ``a`` or ``b`` coincides with ``apex``.
    """
    ax, ay = a.x - apex.x, a.y - apex.y
    bx, by = b.x - apex.x, b.y - apex.y
    na = math.hypot(ax, ay)
    nb = math.hypot(bx, by)
    if na == 0.0 or nb == 0.0:
        msg = f"Angle at {apex} is undefined: a ray has zero length"
        raise DegenerateAngleError(msg)
    cosine = (ax * bx + ay * by) / (na * nb)
    cosine = max(-1.0, min(1.0, cosine))
    return math.degrees(math.acos(cosine))


def _sign(value: float, eps: float) -> int:
    if value > eps:
        return 1
    if value < -eps:
        return -1
    return 0


def _within_box(p: Point, q: Point, r: Point, tol: float) -> bool:
    # q lies in the bounding box of p and r
    return (
        min(p.x, r.x) - tol <= q.x <= max(p.x, r.x) + tol
        and min(p.y, r.y) - tol <= q.y <= max(p.y, r.y) + tol
    )


def segments_cross(s1: Segment, s2: Segment, shared_endpoint_ok: bool = True) -> bool:
    """Return True if the closed segments share at least one point.

    With ``shared_endpoint_ok`` set, contact confined to a common endpoint
    does not count. Orientation values within ``1e-9 * diag**2`` of zero are
    treated as collinear, where ``diag`` is the diagonal of the bounding box
    of the four endpoints.

    Example:
        >>> s1 = Segment(Point(0, 0), Point(2, 2))
        >>> s2 = Segment(Point(0, 2), Point(2, 0))
        >>> segments_cross(s1, s2)
        True
    """
    pts = (s1.a, s1.b, s2.a, s2.b)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    eps = ORIENTATION_EPSILON * diag * diag
    tol = ORIENTATION_EPSILON * diag

    if shared_endpoint_ok:
        for p, q1 in ((s1.a, s1.b), (s1.b, s1.a)):
            for q, q2 in ((s2.a, s2.b), (s2.b, s2.a)):
                if euclid_dist(p, q) <= tol:
                    if euclid_dist(p, q1) <= tol or euclid_dist(q, q2) <= tol:
                        return False
                    if _sign(orientation(p, q1, q2), eps) != 0:
                        return False
                    # collinear: they overlap beyond the shared point iff on the same side
                    dot = (q1.x - p.x) * (q2.x - p.x) + (q1.y - p.y) * (q2.y - p.y)
                    return dot > 0.0

    o1 = _sign(orientation(s1.a, s1.b, s2.a), eps)
    o2 = _sign(orientation(s1.a, s1.b, s2.b), eps)
    o3 = _sign(orientation(s2.a, s2.b, s1.a), eps)
    o4 = _sign(orientation(s2.a, s2.b, s1.b), eps)

    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _within_box(s1.a, s2.a, s1.b, tol):
        return True
    if o2 == 0 and _within_box(s1.a, s2.b, s1.b, tol):
        return True
    if o3 == 0 and _within_box(s2.a, s1.a, s2.b, tol):
        return True
    return o4 == 0 and _within_box(s2.a, s1.b, s2.b, tol)


def fermat_point(a: Point, b: Point, c: Point) -> FermatResult:
    """Return the point minimising ``|Sa| + |Sb| + |Sc|``.

    If some interior angle is at least 120 degrees that corner is returned
    as an inherent Steiner point; collinear triples therefore return the
    middle point. Otherwise the interior Torricelli point is computed in
    closed form from its barycentric coordinates
    ``a / sin(A + 60deg) : b / sin(B + 60deg) : c / sin(C + 60deg)``.

    Raises:
        DegenerateTriangleError: If two corners coincide.
    """
    corners = (a, b, c)
    if euclid_dist(a, b) == 0.0 or euclid_dist(b, c) == 0.0 or euclid_dist(a, c) == 0.0:
        msg = f"Triangle corners must be pairwise distinct: {a}, {b}, {c}"
        raise DegenerateTriangleError(msg)

    angles = (angle_at(a, b, c), angle_at(b, a, c), angle_at(c, a, b))
    widest = max(range(3), key=lambda i: angles[i])
    if angles[widest] >= INHERENT_ANGLE_DEGREES:
        return FermatResult(point=corners[widest], inherent=True, inherent_vertex=widest)

    sides = (euclid_dist(b, c), euclid_dist(a, c), euclid_dist(a, b))
    lambdas = [
        side / math.sin(math.radians(angle) + math.pi / 3.0)
        for side, angle in zip(sides, angles)
    ]
    total = sum(lambdas)
    x = sum(lam * p.x for lam, p in zip(lambdas, corners)) / total
    y = sum(lam * p.y for lam, p in zip(lambdas, corners)) / total
    return FermatResult(point=Point(x, y), inherent=False)


def weighted_distance_sum(point: Point, neighbors: Sequence[tuple[Point, float]]) -> float:
    """Return ``sum(factor * |point - neighbour|)``."""
    return sum(factor * euclid_dist(point, pos) for pos, factor in neighbors)


def weighted_fermat_point(
    neighbors: Sequence[tuple[Point, float]],
    start: Point,
    *,
    max_iterations: int = 10_000,
    tolerance: float = 1e-12,
    on_iterate: Optional[Callable[[int, float], None]] = None,
) -> WeightedFermatResult:
    """Minimise ``sum(factor_i * |P - n_i|)`` by damped iterative reweighting.

    Starting from ``start``, each step moves to the reweighted average of
    the neighbours. A step that does not decrease the objective is halved
    until it does, so the objective never increases. When an iterate lands
    on a neighbour (within 1e-12, scaled by the neighbourhood size) that
    neighbour's subgradient condition decides between stopping there and
    stepping out of it along the resultant pull.

    Args:
        neighbors: ``(position, factor)`` pairs; factors must be positive.
        start: Initial iterate.
        max_iterations: Iteration cap; when reached ``converged`` is False
            and the best iterate is returned.
        tolerance: Relative decrease below which the descent stops.
        on_iterate: Called with ``(iteration, objective)`` after each
            accepted step.

    Returns:
        The best point found with its objective value.

    Raises:
        GeometryError: If no neighbours are given or a factor is not positive.
    """
    if not neighbors:
        msg = "weighted_fermat_point needs at least one neighbour"
        raise GeometryError(msg)
    anchors = np.array([[p.x, p.y] for p, _ in neighbors], dtype=float)
    factors = np.array([f for _, f in neighbors], dtype=float)
    if np.any(factors <= 0) or not np.all(np.isfinite(factors)):
        msg = f"Edge weight factors must be positive, got {factors.tolist()}"
        raise GeometryError(msg)

    def objective(x: np.ndarray) -> float:
        return float(factors @ np.linalg.norm(anchors - x, axis=1))

    x = np.array([start.x, start.y], dtype=float)
    extent = float(np.ptp(anchors, axis=0).max()) if len(anchors) > 1 else 0.0
    extent = max(extent, float(np.linalg.norm(anchors - x, axis=1).max()), 1.0)
    snap = ANCHOR_SNAP_DISTANCE * extent
    f = objective(x)

    for iteration in range(1, max_iterations + 1):
        dists = np.linalg.norm(anchors - x, axis=1)
        nearest = int(np.argmin(dists))
        if dists[nearest] <= snap:
            x = anchors[nearest].copy()
            f = objective(x)
            offsets = anchors - x
            lengths = np.linalg.norm(offsets, axis=1)
            at_anchor = lengths <= snap
            resting = float(factors[at_anchor].sum())
            others = ~at_anchor
            if not np.any(others):
                return WeightedFermatResult(_as_point(x), f, iteration, True)
            pull = (factors[others, None] * offsets[others] / lengths[others, None]).sum(axis=0)
            strength = float(np.linalg.norm(pull))
            if strength <= resting:
                return WeightedFermatResult(_as_point(x), f, iteration, True)
            step = (strength - resting) / float((factors[others] / lengths[others]).sum())
            candidate = x + step * pull / strength
        else:
            inverse = factors / dists
            candidate = inverse @ anchors / inverse.sum()

        f_candidate = objective(candidate)
        halvings = 0
        while f_candidate > f and halvings < 40:
            candidate = 0.5 * (x + candidate)
            f_candidate = objective(candidate)
            halvings += 1
        if f_candidate > f:
            return WeightedFermatResult(_as_point(x), f, iteration, True)

        decrease = f - f_candidate
        x, f = candidate, f_candidate
        if on_iterate is not None:
            on_iterate(iteration, f)
        if decrease <= tolerance * max(f, 1e-300):
            return WeightedFermatResult(_as_point(x), f, iteration, True)

    return WeightedFermatResult(_as_point(x), f, max_iterations, False)


def _as_point(x: np.ndarray) -> Point:
    return Point(float(x[0]), float(x[1]))
