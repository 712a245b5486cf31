"""Weighted minimum spanning trees.

Both builders are adaptations of Prim's algorithm on the complete graph
whose edge costs are connection costs. The plane variant only accepts
edges that do not touch any already accepted edge away from a shared
endpoint.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np

from soapfilm.domain.errors import DuplicateTerminalError, InfeasiblePlaneTreeError
from soapfilm.domain.geometry import WeightedVertex, segments_cross
from soapfilm.domain.tree import PlaneTree

__all__ = ["check_distinct", "cost_matrix", "plane_weighted_mst", "weighted_mst"]

logger = logging.getLogger(__name__)


def _ordered(
    terminals: Sequence[WeightedVertex], insertion_order: Optional[Sequence[int]]
) -> list[WeightedVertex]:
    by_id = {}
    for vertex in terminals:
        if vertex.id in by_id:
            msg = f"Terminal id {vertex.id} appears twice"
            raise ValueError(msg)
        by_id[vertex.id] = vertex
    if insertion_order is None:
        return list(terminals)
    if sorted(insertion_order) != sorted(by_id):
        msg = "insertion_order must be a permutation of the terminal ids"
        raise ValueError(msg)
    return [by_id[i] for i in insertion_order]


def check_distinct(terminals: Sequence[WeightedVertex]) -> None:
    """Raise DuplicateTerminalError, numbered by position, on a repeated position."""
    seen: dict[tuple[float, float], int] = {}
    for index, vertex in enumerate(terminals):
        key = vertex.pos.as_tuple()
        if key in seen:
            msg = f"Terminals {seen[key]} and {vertex.id} share position {key}"
            raise DuplicateTerminalError(msg, line=index + 1)
        seen[key] = vertex.id


def cost_matrix(terminals: Sequence[WeightedVertex]) -> np.ndarray:
    """Return the dense matrix of pairwise connection costs."""
    xy = np.array([v.pos.as_tuple() for v in terminals], dtype=float).reshape(-1, 2)
    w = np.array([v.weight for v in terminals], dtype=float)
    dist = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=2)
    result: np.ndarray = 0.5 * (w[:, None] + w[None, :]) * dist
    return result


def weighted_mst(
    terminals: Sequence[WeightedVertex],
    insertion_order: Optional[Sequence[int]] = None,
) -> PlaneTree:
    """Return a spanning tree of minimum total connection cost.

    Ties between equally cheap candidates go to the vertex that comes
    first in ``insertion_order`` (input order by default). The result may
    contain crossing edges.

    Args:
        terminals: Terminal vertices, at least one.
        insertion_order: Optional permutation of the terminal ids.

    Returns:
        The weighted MST as a :class:`PlaneTree`.

    Raises:
        DuplicateTerminalError: If two terminals share a position.

    Example:
        >>> from soapfilm.domain.families import rectangle
        >>> tree = weighted_mst(rectangle(2.0, 7.0))
        >>> tree.edges()
        [(0, 1), (1, 2), (2, 3)]
    """
    ordered = _ordered(terminals, insertion_order)
    if not ordered:
        msg = "At least one terminal is required"
        raise ValueError(msg)
    check_distinct(ordered)

    n = len(ordered)
    costs = cost_matrix(ordered)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = costs[0].copy()
    parent = np.zeros(n, dtype=int)
    edges = []

    for _ in range(n - 1):
        candidates = np.where(in_tree, np.inf, best)
        v = int(np.argmin(candidates))
        in_tree[v] = True
        edges.append((ordered[int(parent[v])].id, ordered[v].id))
        improved = (~in_tree) & (costs[v] < best)
        best[improved] = costs[v][improved]
        parent[improved] = v

    return PlaneTree(ordered, edges)


def plane_weighted_mst(
    terminals: Sequence[WeightedVertex],
    insertion_order: Optional[Sequence[int]] = None,
) -> PlaneTree:
    """Return a crossing-free spanning tree grown in Prim fashion.

    At every step the candidate pairs (tree vertex, outside vertex) are
    scanned in increasing connection cost, ties broken by the outside
    vertex's insertion position and then by the order in which the tree
    vertex joined. The first pair whose segment does not cross an accepted
    edge is taken. When the cheapest vertex is blocked this falls back to
    the next cheapest pair, so a greater connection cost is accepted. A
    blocked pair followed by one of equal cost is not counted as such a
    fallback in the debug log.

    Raises:
        DuplicateTerminalError: If two terminals share a position.
        InfeasiblePlaneTreeError: If no outside vertex can be attached.
    """
    ordered = _ordered(terminals, insertion_order)
    if not ordered:
        msg = "At least one terminal is required"
        raise ValueError(msg)
    check_distinct(ordered)

    n = len(ordered)
    costs = cost_matrix(ordered)
    tree = PlaneTree(ordered)
    joined = [0]
    outside = list(range(1, n))
    fallbacks = 0

    while outside:
        tree_idx = np.array(joined)
        out_idx = np.array(outside)
        block = costs[np.ix_(tree_idx, out_idx)]
        join_rank = np.repeat(np.arange(len(joined)), len(outside))
        out_rank = np.tile(out_idx, len(joined))
        order = np.lexsort((join_rank, out_rank, block.ravel()))

        flat_costs = block.ravel()
        accepted = None
        for flat in order:
            u = int(tree_idx[flat // len(outside)])
            v = int(out_idx[flat % len(outside)])
            candidate = tree.segment(ordered[u].id, ordered[v].id)
            if not any(
                segments_cross(candidate, segment, shared_endpoint_ok=True)
                for _, segment in tree.iter_segments()
            ):
                accepted = (u, v)
                if flat_costs[flat] > flat_costs[order[0]]:
                    fallbacks += 1
                break
        if accepted is None:
            msg = (
                f"No crossing-free edge attaches any of the {len(outside)} "
                "remaining terminals"
            )
            raise InfeasiblePlaneTreeError(msg)

        u, v = accepted
        tree.add_edge(ordered[u].id, ordered[v].id)
        joined.append(v)
        outside.remove(v)

    if fallbacks:
        logger.debug("Plane WMST took %d non-cheapest edges to avoid crossings", fallbacks)
    return tree
