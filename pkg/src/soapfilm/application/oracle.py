"""Exhaustive weighted Steiner minimal trees for small instances.

Every Steiner topology on up to seven terminals is generated: all
labelled spanning trees (Steiner-free) and all full topologies, in which
each terminal is a leaf and each of the ``n - 2`` Steiner points has
degree three. Topologies with fewer Steiner points are reached by
Steiner points collapsing onto terminals or onto each other while a full
topology is optimised.

For a fixed topology and fixed weights the weighted length is convex in
the Steiner positions. All full topologies are first optimised together
by batched iteratively reweighted least squares, then the best few are
polished by cyclic weighted Fermat updates.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Optional

import networkx as nx
import numpy as np

from soapfilm.domain.errors import CapExceededError
from soapfilm.domain.geometry import Point, VertexKind, WeightedVertex, weighted_fermat_point
from soapfilm.domain.tree import Edge, PlaneTree, tree_metrics
from soapfilm.domain.wmst import check_distinct, cost_matrix

__all__ = [
    "MAX_ORACLE_TERMINALS",
    "OptimizedTopology",
    "OracleResult",
    "Topology",
    "enumerate_topologies",
    "optimize_topology",
    "oracle_wsmt",
    "steiner_weights",
]

logger = logging.getLogger(__name__)

MAX_ORACLE_TERMINALS = 7
MULTI_STARTS = 3
JITTER_FRACTION = 0.05
ORACLE_SEED = 20_240_917
IRLS_MAX_ITERATIONS = 3000
IRLS_TOLERANCE = 1e-15
DISTANCE_FLOOR = 1e-12
POLISH_CANDIDATES = 3
POLISH_SWEEPS = 500
POLISH_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Topology:
    """A tree over terminal slots ``0..n-1`` and Steiner slots ``n..n+k-1``.

    Example:
        >>> star = Topology(3, 1, ((0, 3), (1, 3), (2, 3)))
        >>> star.is_full
        True
    """

    terminal_count: int
    steiner_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        n, k = self.terminal_count, self.steiner_count
        if n < 1 or not 0 <= k <= max(n - 2, 0):
            msg = f"Invalid topology size: {n} terminals, {k} Steiner points"
            raise ValueError(msg)
        graph = self.graph()
        if not nx.is_tree(graph):
            msg = f"Topology edges {self.edges} do not form a tree"
            raise ValueError(msg)
        for s in range(n, n + k):
            if graph.degree[s] != 3:
                msg = f"Steiner slot {s} has degree {graph.degree[s]}, expected 3"
                raise ValueError(msg)

    @property
    def is_full(self) -> bool:
        return self.terminal_count >= 3 and self.steiner_count == self.terminal_count - 2

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.terminal_count + self.steiner_count))
        graph.add_edges_from(self.edges)
        return graph

    def steiner_neighbors(self) -> list[list[int]]:
        graph = self.graph()
        n = self.terminal_count
        return [sorted(graph.neighbors(s)) for s in range(n, n + self.steiner_count)]


class OptimizedTopology(NamedTuple):
    tree: PlaneTree
    weighted_length: float
    converged: bool


@dataclass(frozen=True)
class OracleResult:
    """Best tree over every enumerated topology."""

    best_tree: PlaneTree
    best_weighted_length: float
    best_euclidean_length: float
    topologies_examined: int
    best_topology: Topology
    converged: bool = True


def _sorted_edges(edges: Sequence[tuple[int, int]]) -> tuple[Edge, ...]:
    return tuple(sorted((min(u, v), max(u, v)) for u, v in edges))


@lru_cache(maxsize=None)
def _spanning_topologies(n: int) -> tuple[Topology, ...]:
    if n == 1:
        return (Topology(1, 0, ()),)
    if n == 2:
        return (Topology(2, 0, ((0, 1),)),)
    result = []
    for sequence in product(range(n), repeat=n - 2):
        tree = nx.from_prufer_sequence(list(sequence))
        result.append(Topology(n, 0, _sorted_edges(list(tree.edges))))
    return tuple(result)


@lru_cache(maxsize=None)
def _full_topologies(n: int) -> tuple[Topology, ...]:
    if n < 3:
        return ()
    # Grow from the star on terminals 0, 1, 2 by subdividing one edge per new terminal.
    partial: list[list[Edge]] = [[(0, n), (1, n), (2, n)]]
    for terminal in range(3, n):
        steiner = n + terminal - 2
        grown = []
        for edges in partial:
            for index, (u, v) in enumerate(edges):
                rest = edges[:index] + edges[index + 1 :]
                grown.append([*rest, (u, steiner), (steiner, v), (terminal, steiner)])
        partial = grown
    return tuple(Topology(n, n - 2, _sorted_edges(edges)) for edges in partial)


def _check_size(n: int) -> None:
    if n < 1:
        msg = f"At least one terminal is required, got {n}"
        raise ValueError(msg)
    if n > MAX_ORACLE_TERMINALS:
        msg = f"Exhaustive search is capped at {MAX_ORACLE_TERMINALS} terminals, got {n}"
        raise CapExceededError(msg)


def enumerate_topologies(n: int) -> list[Topology]:
    """Return every spanning-tree and full Steiner topology on ``n`` terminals.

    There are ``n ** (n - 2)`` spanning trees and ``(2n - 5)!!`` full
    topologies.

    Raises:
        CapExceededError: If ``n`` exceeds seven.
    """
    _check_size(n)
    return [*_spanning_topologies(n), *_full_topologies(n)]


def steiner_weights(topology: Topology, terminal_weights: Sequence[float]) -> np.ndarray:
    """Greatest weights satisfying ``w(S) = min`` of the neighbours' weights.

    Iterates the min rule from ``+inf``; the sequence only decreases, so it
    stops after at most ``k + 1`` rounds.
    """
    n, k = topology.terminal_count, topology.steiner_count
    weights = np.concatenate([np.asarray(terminal_weights, dtype=float), np.full(k, np.inf)])
    neighbors = topology.steiner_neighbors()
    changed = True
    while changed:
        changed = False
        for j, adjacent in enumerate(neighbors):
            value = float(weights[adjacent].min())
            if value < weights[n + j]:
                weights[n + j] = value
                changed = True
    steiner: np.ndarray = weights[n:]
    return steiner


def _edge_factors(topology: Topology, terminal_weights: np.ndarray) -> np.ndarray:
    weights = np.concatenate([terminal_weights, steiner_weights(topology, terminal_weights)])
    edges = np.array(topology.edges, dtype=int).reshape(-1, 2)
    factors: np.ndarray = 0.5 * (weights[edges[:, 0]] + weights[edges[:, 1]])
    return factors


class _Batch(NamedTuple):
    edges: np.ndarray
    factors: np.ndarray


def _assembly(
    terminal_xy: np.ndarray, edges: np.ndarray, steiner_count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Linear maps from edge coefficients to the Laplacian and the right-hand side.

    Returns:
        Arrays of shape ``(B, k, k, m)`` and ``(B, k, 2, m)``; contracting
        their last axis with per-edge coefficients yields the system of
        every problem.
    """
    n, k = terminal_xy.shape[0], steiner_count
    size, m = edges.shape[:2]
    lap = np.zeros((size, k, k, m))
    rhs = np.zeros((size, k, 2, m))
    problem, edge = np.meshgrid(np.arange(size), np.arange(m), indexing="ij")
    u, v = edges[..., 0], edges[..., 1]
    for this, that in ((u, v), (v, u)):
        movable = this >= n
        lap[problem[movable], this[movable] - n, this[movable] - n, edge[movable]] += 1.0
        inner = movable & (that >= n)
        lap[problem[inner], this[inner] - n, that[inner] - n, edge[inner]] -= 1.0
        outer = movable & (that < n)
        rhs[problem[outer], this[outer] - n, :, edge[outer]] += terminal_xy[that[outer]]
    return lap, rhs


def _irls(
    terminal_xy: np.ndarray,
    batch: _Batch,
    starts: Optional[np.ndarray],
    steiner_count: int,
    *,
    max_iterations: int = IRLS_MAX_ITERATIONS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimise every problem of a batch at once.

    Each step solves the weighted Laplacian system obtained by freezing the
    edge coefficients ``factor / length``; a step is kept only where it
    lowers the objective, and problems leave the batch once their relative
    decrease drops below ``IRLS_TOLERANCE``. With ``starts`` omitted a
    single unit-coefficient solve is returned.

    Returns:
        Steiner positions ``(B, k, 2)``, objectives ``(B,)`` and
        convergence flags ``(B,)``.
    """
    n = terminal_xy.shape[0]
    edges, factors = batch.edges, batch.factors
    size = factors.shape[0]
    lap_map, rhs_map = _assembly(terminal_xy, edges, steiner_count)
    extent = float(np.ptp(terminal_xy, axis=0).max()) if n > 1 else 1.0
    floor = DISTANCE_FLOOR * max(extent, 1.0)

    def objective(x: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fixed = np.broadcast_to(terminal_xy, (len(rows), n, 2))
        points = np.concatenate([fixed, x], axis=1)
        picked = np.arange(len(rows))[:, None]
        ends = edges[rows]
        d = np.linalg.norm(points[picked, ends[..., 0]] - points[picked, ends[..., 1]], axis=2)
        return (factors[rows] * d).sum(axis=1), d

    def solve_step(coefficients: np.ndarray, rows: np.ndarray) -> np.ndarray:
        lap = np.einsum("bijm,bm->bij", lap_map[rows], coefficients)
        rhs = np.einsum("bicm,bm->bic", rhs_map[rows], coefficients)
        solved: np.ndarray = np.linalg.solve(lap, rhs)
        return solved

    every = np.arange(size)
    if starts is None:
        x = solve_step(np.ones_like(factors), every)
        f, _ = objective(x, every)
        return x, f, np.zeros(size, dtype=bool)

    x = starts.copy()
    f, d = objective(x, every)
    converged = np.zeros(size, dtype=bool)
    for _ in range(max_iterations):
        active = np.flatnonzero(~converged)
        if active.size == 0:
            break
        x_new = solve_step(factors[active] / np.maximum(d[active], floor), active)
        f_new, d_new = objective(x_new, active)
        better = f_new < f[active]
        decrease = np.where(better, f[active] - f_new, 0.0)
        improved = active[better]
        x[improved] = x_new[better]
        d[improved] = d_new[better]
        f[improved] = f_new[better]
        converged[active] = decrease <= IRLS_TOLERANCE * f[active]
    return x, f, converged


def _build_tree(
    topology: Topology,
    terminals: Sequence[WeightedVertex],
    positions: np.ndarray,
) -> PlaneTree:
    n = topology.terminal_count
    base = max(v.id for v in terminals) + 1
    weights = steiner_weights(topology, [v.weight for v in terminals])
    vertices = list(terminals)
    for j in range(topology.steiner_count):
        pos = Point(float(positions[j, 0]), float(positions[j, 1]))
        vertices.append(WeightedVertex(base + j, pos, float(weights[j]), VertexKind.STEINER))

    def vertex_id(slot: int) -> int:
        return terminals[slot].id if slot < n else base + slot - n

    return PlaneTree(vertices, [(vertex_id(a), vertex_id(b)) for a, b in topology.edges])


def _polish(tree: PlaneTree) -> tuple[PlaneTree, bool]:
    """Cyclic weighted Fermat updates of every Steiner point until the length settles."""
    steiners = sorted(tree.steiner_ids())
    current = tree_metrics(tree).weighted_length
    for _ in range(POLISH_SWEEPS):
        for sid in steiners:
            vertex = tree.vertex(sid)
            anchors = [
                (tree.pos(n), 0.5 * (vertex.weight + tree.vertex(n).weight))
                for n in tree.neighbors(sid)
            ]
            result = weighted_fermat_point(anchors, vertex.pos)
            tree.move(sid, result.point)
        new = tree_metrics(tree).weighted_length
        if current - new <= POLISH_TOLERANCE * max(new, 1e-300):
            return tree, True
        current = new
    return tree, False


def _starts(
    terminal_xy: np.ndarray, batch: _Batch, steiner_count: int, rng: np.random.Generator
) -> tuple[_Batch, np.ndarray]:
    """Repeat each problem once per start: a unit-coefficient solve plus jittered copies."""
    base, _, _ = _irls(terminal_xy, batch, None, steiner_count)
    extent = float(np.linalg.norm(np.ptp(terminal_xy, axis=0))) or 1.0
    starts = [base]
    for _ in range(MULTI_STARTS - 1):
        starts.append(base + rng.normal(0.0, JITTER_FRACTION * extent, size=base.shape))
    repeated = _Batch(
        edges=np.concatenate([batch.edges] * MULTI_STARTS),
        factors=np.concatenate([batch.factors] * MULTI_STARTS),
    )
    return repeated, np.concatenate(starts)


def _optimize_full(
    topologies: Sequence[Topology], terminals: Sequence[WeightedVertex]
) -> list[tuple[float, int, np.ndarray, bool]]:
    """Batched optimisation; returns ``(length, index, positions, converged)`` best first."""
    terminal_xy = np.array([v.pos.as_tuple() for v in terminals], dtype=float)
    terminal_w = np.array([v.weight for v in terminals], dtype=float)
    k = topologies[0].steiner_count
    batch = _Batch(
        edges=np.array([t.edges for t in topologies], dtype=int),
        factors=np.array([_edge_factors(t, terminal_w) for t in topologies]),
    )
    rng = np.random.default_rng(ORACLE_SEED)
    repeated, starts = _starts(terminal_xy, batch, k, rng)
    positions, lengths, converged = _irls(terminal_xy, repeated, starts, k)

    count = len(topologies)
    best: dict[int, tuple[float, int, np.ndarray, bool]] = {}
    for row in np.argsort(lengths, kind="stable"):
        index = int(row) % count
        if index not in best:
            best[index] = (float(lengths[row]), index, positions[row], bool(converged[row]))
    return sorted(best.values(), key=lambda item: (item[0], item[1]))


def optimize_topology(
    topology: Topology, terminals: Sequence[WeightedVertex]
) -> OptimizedTopology:
    """Place the Steiner points of one topology to minimise weighted length.

    Steiner weights follow :func:`steiner_weights`. Three starts are used
    (a unit-coefficient solve and two jittered copies with a fixed seed),
    each refined by reweighted least squares and then by cyclic weighted
    Fermat updates to a relative change of ``1e-12``.

    Args:
        topology: Topology whose terminal slots index ``terminals``.
        terminals: Terminal vertices in slot order.

    Returns:
        ``OptimizedTopology(tree, weighted_length, converged)``.
    """
    if topology.terminal_count != len(terminals):
        msg = (
            f"Topology has {topology.terminal_count} terminal slots "
            f"but {len(terminals)} terminals were given"
        )
        raise ValueError(msg)
    if topology.steiner_count == 0:
        tree = _build_tree(topology, terminals, np.zeros((0, 2)))
        return OptimizedTopology(tree, tree_metrics(tree).weighted_length, True)

    _, _, positions, irls_converged = _optimize_full([topology], terminals)[0]
    tree, polished = _polish(_build_tree(topology, terminals, positions))
    return OptimizedTopology(
        tree, tree_metrics(tree).weighted_length, irls_converged or polished
    )


def oracle_wsmt(terminals: Sequence[WeightedVertex]) -> OracleResult:
    """Return the weighted Steiner minimal tree by exhaustive search.

    Steiner weights follow the minimum rule: each Steiner point takes the
    smallest weight among its neighbours. A light Steiner point beside a
    heavy terminal is therefore pulled onto that terminal. On the 2 x 2
    square with weight 7 on ``A`` and ``D`` both Steiner points collapse
    onto ``A`` and ``D``, giving weighted length 6, rather than settling
    near them.

    Raises:
        CapExceededError: If more than seven terminals are given.
        DuplicateTerminalError: If two terminals share a position.

    Example:
        >>> from soapfilm.domain.families import triangle_corners
        >>> result = oracle_wsmt(triangle_corners())
        >>> round(result.best_euclidean_length, 6)
        3.464102
    """
    terminals = list(terminals)
    n = len(terminals)
    _check_size(n)
    check_distinct(terminals)
    spanning = _spanning_topologies(n)
    full = _full_topologies(n)

    costs = cost_matrix(terminals)
    if n == 1:
        span_lengths = np.zeros(1)
    else:
        edge_array = np.array([t.edges for t in spanning], dtype=int)
        span_lengths = costs[edge_array[..., 0], edge_array[..., 1]].sum(axis=1)
    span_best = int(np.argmin(span_lengths))
    best_topology = spanning[span_best]
    best_tree = _build_tree(best_topology, terminals, np.zeros((0, 2)))
    best_length = float(span_lengths[span_best])
    converged = True

    if full:
        ranked = _optimize_full(full, terminals)
        for length, index, positions, irls_converged in ranked[:POLISH_CANDIDATES]:
            tree, polished = _polish(_build_tree(full[index], terminals, positions))
            polished_length = tree_metrics(tree).weighted_length
            if polished_length < best_length:
                best_length = polished_length
                best_tree = tree
                best_topology = full[index]
                converged = irls_converged or polished
            logger.debug(
                "Topology %d: batched %.12f, polished %.12f", index, length, polished_length
            )

    if not converged:
        logger.warning("Exhaustive search: best topology did not fully converge")
    examined = len(spanning) + len(full)
    logger.info("Examined %d topologies on %d terminals", examined, n)
    return OracleResult(
        best_tree=best_tree,
        best_weighted_length=best_length,
        best_euclidean_length=tree_metrics(best_tree).euclidean_length,
        topologies_examined=examined,
        best_topology=best_topology,
        converged=converged,
    )
