"""
Metric graphs: vertices joined by edges of positive length, with the
shortest-path (geodesic) metric.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    id: int
    u: object
    v: object
    length: float

    def endpoint(self, end):
        """Vertex at ``end`` (0 for the first endpoint, 1 for the second)."""
        return self.u if end == 0 else self.v

    def offset_of(self, end):
        return 0.0 if end == 0 else self.length


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A point of the graph addressed by edge id and arc length from the edge's first endpoint."""

    edge: int
    offset: float


class MetricGraph:
    """
    Connected metric graph.

    Vertices may be any hashable ids; edges are ``(u, v, length)`` triples and
    get ids in the order given. Parallel edges are allowed, self-loops are not.
    Instances are immutable after construction.
    """

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("Duplicate vertex ids")
        self._vertex_index = {vertex: i for i, vertex in enumerate(self.vertices)}

        built = []
        for edge_id, (u, v, length) in enumerate(edges):
            if u not in self._vertex_index or v not in self._vertex_index:
                raise InputError("Edge references an unknown vertex", edge=edge_id, u=u, v=v)
            if u == v:
                raise InputError("Self-loops are not supported", edge=edge_id, vertex=u)
            length = float(length)
            if not np.isfinite(length) or length <= 0:
                raise InputError("Edge length must be positive", edge=edge_id, length=length)
            built.append(Edge(edge_id, u, v, length))
        if not built:
            raise InputError("A metric graph needs at least one edge")
        self.edges = tuple(built)

        self._nx = nx.MultiGraph()
        self._nx.add_nodes_from(self.vertices)
        for edge in self.edges:
            self._nx.add_edge(edge.u, edge.v, key=edge.id, length=edge.length)
        if not nx.is_connected(self._nx):
            raise InputError("Graph must be connected")

        # Floyd-Warshall keeps the shortest of parallel edges.
        self._vertex_distances = nx.floyd_warshall_numpy(
            self._nx, nodelist=list(self.vertices), weight="length"
        )

        self._incident = {vertex: [] for vertex in self.vertices}
        for edge in self.edges:
            self._incident[edge.u].append((edge.id, 0))
            self._incident[edge.v].append((edge.id, 1))

        logger.debug(
            "Built metric graph with %d vertices and %d edges",
            len(self.vertices),
            len(self.edges),
        )

    def __repr__(self):
        return f"MetricGraph(vertices={len(self.vertices)}, edges={len(self.edges)})"

    @property
    def nx_graph(self):
        return self._nx

    @cached_property
    def total_length(self):
        return float(sum(edge.length for edge in self.edges))

    @cached_property
    def max_degree(self):
        return max(len(incident) for incident in self._incident.values())

    def edge(self, edge_id):
        if not isinstance(edge_id, (int, np.integer)) or not 0 <= edge_id < len(self.edges):
            raise InputError("Unknown edge", edge=edge_id)
        return self.edges[int(edge_id)]

    def degree(self, vertex):
        return len(self.incident(vertex))

    def incident(self, vertex):
        """``(edge id, end)`` pairs of the edges touching ``vertex``, in edge id order."""
        if vertex not in self._incident:
            raise InputError("Unknown vertex", vertex=vertex)
        return tuple(self._incident[vertex])

    def vertex_distance(self, a, b):
        return float(self._vertex_distances[self._vertex_index[a], self._vertex_index[b]])

    def vertex_point(self, vertex):
        """Canonical point of ``vertex``: an endpoint of its lowest-id incident edge."""
        edge_id, end = self.incident(vertex)[0]
        return GraphPoint(edge_id, self.edges[edge_id].offset_of(end))

    def vertex_at(self, point):
        """Vertex id when ``point`` sits on an endpoint of its edge, else ``None``."""
        edge = self.edge(point.edge)
        tol = hj_settings.SNAP_TOLERANCE * max(1.0, edge.length)
        if abs(point.offset) <= tol:
            return edge.u
        if abs(point.offset - edge.length) <= tol:
            return edge.v
        return None

    def validate_point(self, point):
        """Return ``point`` clamped into its edge, or raise for offsets outside it."""
        if not isinstance(point, GraphPoint):
            raise InputError("Expected a GraphPoint", point=point)
        edge = self.edge(point.edge)
        offset = float(point.offset)
        tol = hj_settings.SNAP_TOLERANCE * max(1.0, edge.length)
        if not np.isfinite(offset) or offset < -tol or offset > edge.length + tol:
            raise InputError("Offset outside edge", edge=point.edge, offset=offset)
        return GraphPoint(point.edge, min(max(offset, 0.0), edge.length))

    def canonical(self, point):
        """Snap ``point`` to the canonical representative so equal points compare equal."""
        point = self.validate_point(point)
        vertex = self.vertex_at(point)
        if vertex is not None:
            return self.vertex_point(vertex)
        return point

    def point_at(self, edge_id, offset):
        return self.canonical(GraphPoint(int(edge_id), float(offset)))

    def _ends(self, point):
        edge = self.edges[point.edge]
        return (
            (self._vertex_index[edge.u], point.offset),
            (self._vertex_index[edge.v], edge.length - point.offset),
        )

    def geodesic_distance(self, a, b):
        """Length of the shortest path between two points of the graph."""
        a = self.canonical(a)
        b = self.canonical(b)
        if a == b:
            return 0.0
        best = np.inf
        if a.edge == b.edge:
            best = abs(a.offset - b.offset)
        for ia, da in self._ends(a):
            for ib, db in self._ends(b):
                best = min(best, da + self._vertex_distances[ia, ib] + db)
        return float(best)

    def _end_arrays(self, points):
        points = [self.canonical(point) for point in points]
        edge_ids = np.array([point.edge for point in points], dtype=int)
        offsets = np.array([point.offset for point in points], dtype=float)
        lengths = np.array([self.edges[e].length for e in edge_ids], dtype=float)
        first = np.array([self._vertex_index[self.edges[e].u] for e in edge_ids], dtype=int)
        second = np.array([self._vertex_index[self.edges[e].v] for e in edge_ids], dtype=int)
        ends = np.stack([first, second], axis=1)
        reach = np.stack([offsets, lengths - offsets], axis=1)
        return edge_ids, offsets, ends, reach

    def distance_matrix(self, points_a, points_b=None):
        """Geodesic distances between every point of ``points_a`` and of ``points_b``."""
        if points_b is None:
            points_b = points_a
        edges_a, offsets_a, ends_a, reach_a = self._end_arrays(points_a)
        edges_b, offsets_b, ends_b, reach_b = self._end_arrays(points_b)

        result = np.full((len(edges_a), len(edges_b)), np.inf)
        for i in range(2):
            for j in range(2):
                through = (
                    reach_a[:, i][:, None]
                    + self._vertex_distances[np.ix_(ends_a[:, i], ends_b[:, j])]
                    + reach_b[:, j][None, :]
                )
                np.minimum(result, through, out=result)
        same_edge = edges_a[:, None] == edges_b[None, :]
        direct = np.abs(offsets_a[:, None] - offsets_b[None, :])
        np.minimum(result, np.where(same_edge, direct, np.inf), out=result)
        return result
