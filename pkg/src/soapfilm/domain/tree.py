"""Plane tree structure shared by every stage of the pipeline."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from soapfilm.domain.geometry import (
    Point,
    Segment,
    VertexKind,
    WeightedVertex,
    connection_cost,
    euclid_dist,
    segments_cross,
)

__all__ = [
    "Edge",
    "PlanarityDiagnostic",
    "PlaneTree",
    "TreeMetrics",
    "crossing_pairs",
    "tree_metrics",
]

Edge = tuple[int, int]


def _key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class PlaneTree:
    """Vertices with unordered edges, backed by a ``networkx.Graph``.

    Node ``id`` carries the attribute ``vertex`` holding the
    :class:`WeightedVertex`. Node order follows insertion, so iteration
    is deterministic. Steiner ids are allocated from a counter and never
    reused within one tree lineage.

    Example:
        >>> from soapfilm.domain.geometry import Point, WeightedVertex
        >>> a = WeightedVertex(0, Point(0, 0), 1.0)
        >>> b = WeightedVertex(1, Point(1, 0), 1.0)
        >>> tree = PlaneTree([a, b], [(0, 1)])
        >>> tree.is_spanning_tree()
        True
    """

    def __init__(
        self,
        vertices: Iterable[WeightedVertex] = (),
        edges: Iterable[Edge] = (),
    ) -> None:
        self._graph = nx.Graph()
        self._next_id = 0
        for vertex in vertices:
            self.add_vertex(vertex)
        for u, v in edges:
            self.add_edge(u, v)

    # -- vertices -------------------------------------------------------

    @property
    def vertices(self) -> list[WeightedVertex]:
        return [data["vertex"] for _, data in self._graph.nodes(data=True)]

    @property
    def graph(self) -> nx.Graph:
        """Read-only view of the underlying graph."""
        return self._graph.copy(as_view=True)

    def __len__(self) -> int:
        return self._graph.number_of_nodes()

    def __contains__(self, vertex_id: object) -> bool:
        return vertex_id in self._graph

    def vertex(self, vertex_id: int) -> WeightedVertex:
        vertex: WeightedVertex = self._graph.nodes[vertex_id]["vertex"]
        return vertex

    def pos(self, vertex_id: int) -> Point:
        return self.vertex(vertex_id).pos

    def ids(self) -> list[int]:
        return list(self._graph.nodes)

    def terminal_ids(self) -> list[int]:
        return [v.id for v in self.vertices if not v.is_steiner]

    def steiner_ids(self) -> list[int]:
        return [v.id for v in self.vertices if v.is_steiner]

    def add_vertex(self, vertex: WeightedVertex) -> None:
        if vertex.id in self._graph:
            msg = f"Vertex id {vertex.id} already present"
            raise ValueError(msg)
        self._graph.add_node(vertex.id, vertex=vertex)
        self._next_id = max(self._next_id, vertex.id + 1)

    def add_steiner(self, pos: Point, weight: float) -> WeightedVertex:
        vertex = WeightedVertex(self._next_id, pos, weight, VertexKind.STEINER)
        self.add_vertex(vertex)
        return vertex

    def update_vertex(self, vertex: WeightedVertex) -> None:
        if vertex.id not in self._graph:
            msg = f"Unknown vertex id {vertex.id}"
            raise KeyError(msg)
        self._graph.nodes[vertex.id]["vertex"] = vertex

    def move(self, vertex_id: int, pos: Point) -> None:
        self.update_vertex(self.vertex(vertex_id).moved_to(pos))

    def remove_vertex(self, vertex_id: int) -> None:
        self._graph.remove_node(vertex_id)

    # -- edges ----------------------------------------------------------

    def neighbors(self, vertex_id: int) -> list[int]:
        return sorted(self._graph.neighbors(vertex_id))

    def degree(self, vertex_id: int) -> int:
        return int(self._graph.degree[vertex_id])

    def edges(self) -> list[Edge]:
        return sorted(_key(u, v) for u, v in self._graph.edges)

    def edge_count(self) -> int:
        return self._graph.number_of_edges()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._graph.has_edge(u, v))

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            msg = f"Self-loop on vertex {u} is not allowed"
            raise ValueError(msg)
        for endpoint in (u, v):
            if endpoint not in self._graph:
                msg = f"Edge endpoint {endpoint} does not exist"
                raise KeyError(msg)
        self._graph.add_edge(u, v)

    def remove_edge(self, u: int, v: int) -> None:
        self._graph.remove_edge(u, v)

    def segment(self, u: int, v: int) -> Segment:
        return Segment(self.pos(u), self.pos(v))

    def length(self, u: int, v: int) -> float:
        return euclid_dist(self.pos(u), self.pos(v))

    def iter_segments(self) -> Iterator[tuple[Edge, Segment]]:
        for u, v in self.edges():
            yield (u, v), self.segment(u, v)

    # -- whole-tree queries --------------------------------------------

    def copy(self) -> PlaneTree:
        clone = PlaneTree()
        clone._graph = self._graph.copy()
        clone._next_id = self._next_id
        return clone

    def is_spanning_tree(self) -> bool:
        """Connected, acyclic and free of self-loops."""
        if len(self) == 0:
            return False
        return bool(nx.is_tree(self._graph))

    def bounding_diagonal(self) -> float:
        """Diagonal of the terminals' bounding box, or 1.0 when it is degenerate."""
        points = [v.pos for v in self.vertices if not v.is_steiner] or [
            v.pos for v in self.vertices
        ]
        if not points:
            return 1.0
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        return diag if diag > 0 else 1.0

    def same_shape(self, other: PlaneTree) -> bool:
        """Same vertex records and the same edge set."""
        return self.vertices == other.vertices and self.edges() == other.edges()

    def __repr__(self) -> str:
        return (
            f"PlaneTree(vertices={len(self)}, edges={self.edge_count()}, "
            f"steiner={len(self.steiner_ids())})"
        )


@dataclass(frozen=True)
class TreeMetrics:
    """Weighted and Euclidean total length of a tree."""

    weighted_length: float
    euclidean_length: float


@dataclass(frozen=True)
class PlanarityDiagnostic:
    """Two edges of a tree that touch away from a shared endpoint."""

    edge_a: Edge
    edge_b: Edge


def tree_metrics(tree: PlaneTree) -> TreeMetrics:
    """Sum connection costs and Euclidean lengths over all edges."""
    weighted = 0.0
    euclidean = 0.0
    for u, v in tree.edges():
        a, b = tree.vertex(u), tree.vertex(v)
        weighted += connection_cost(a, b)
        euclidean += euclid_dist(a.pos, b.pos)
    return TreeMetrics(weighted_length=weighted, euclidean_length=euclidean)


def crossing_pairs(tree: PlaneTree) -> list[PlanarityDiagnostic]:
    """Return every edge pair that crosses, touches, or overlaps improperly."""
    segments = list(tree.iter_segments())
    found = []
    for (edge_a, seg_a), (edge_b, seg_b) in combinations(segments, 2):
        if segments_cross(seg_a, seg_b, shared_endpoint_ok=True):
            found.append(PlanarityDiagnostic(edge_a, edge_b))
    return found
