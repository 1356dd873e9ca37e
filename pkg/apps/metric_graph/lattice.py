"""
Spatial lattice of a metric graph: every edge is cut into equal cells no
longer than ``dx`` and vertices are shared between the edges touching them.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

from .graph import GraphPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpaceLattice:
    graph: object
    dx: float
    points: tuple
    edge_nodes: dict
    edge_offsets: dict
    neighbors: tuple
    _index: dict = field(repr=False)

    def __len__(self):
        return len(self.points)

    @property
    def size(self):
        return len(self.points)

    def cell_length(self, edge_id):
        offsets = self.edge_offsets[edge_id]
        return float(offsets[1] - offsets[0])

    @cached_property
    def max_cell(self):
        return max(self.cell_length(edge.id) for edge in self.graph.edges)

    @cached_property
    def min_cells(self):
        """Number of cells on the most coarsely divided edge."""
        return min(len(offsets) - 1 for offsets in self.edge_offsets.values())

    @cached_property
    def vertex_nodes(self):
        """Lattice node index of every graph vertex."""
        return {
            vertex: self._index[self.graph.vertex_point(vertex)] for vertex in self.graph.vertices
        }

    @cached_property
    def adjacent_pairs(self):
        """``(i, j, distance)`` for every pair of neighbouring nodes, ``i < j``."""
        pairs = []
        for edge in self.graph.edges:
            nodes = self.edge_nodes[edge.id]
            step = self.cell_length(edge.id)
            for a, b in zip(nodes[:-1], nodes[1:]):
                pairs.append((min(a, b), max(a, b), step))
        return tuple(pairs)

    @cached_property
    def distances(self):
        """Geodesic distance matrix between all lattice nodes."""
        return self.graph.distance_matrix(self.points)

    def locate(self, point):
        """Node index of ``point`` when it is a lattice node, else ``None``."""
        point = self.graph.canonical(point)
        if point in self._index:
            return self._index[point]
        offsets = self.edge_offsets[point.edge]
        k = int(np.argmin(np.abs(offsets - point.offset)))
        tol = hj_settings.SNAP_TOLERANCE * max(1.0, float(offsets[-1]))
        if abs(offsets[k] - point.offset) <= tol:
            return int(self.edge_nodes[point.edge][k])
        return None

    def cell_of(self, point):
        """
        ``(left node, right node, weight)`` of the cell holding ``point``.

        The interpolated value is ``(1 - weight) * u[left] + weight * u[right]``;
        nodes return themselves with weight 0.
        """
        point = self.graph.canonical(point)
        offsets = self.edge_offsets[point.edge]
        nodes = self.edge_nodes[point.edge]
        k = int(np.searchsorted(offsets, point.offset, side="right")) - 1
        k = min(max(k, 0), len(offsets) - 2)
        left, right = offsets[k], offsets[k + 1]
        weight = (point.offset - left) / (right - left)
        if weight <= 0.0:
            return int(nodes[k]), int(nodes[k]), 0.0
        if weight >= 1.0:
            return int(nodes[k + 1]), int(nodes[k + 1]), 0.0
        return int(nodes[k]), int(nodes[k + 1]), float(weight)

    def interpolate(self, values, point):
        """Piecewise-linear interpolation of node ``values`` along the edge holding ``point``."""
        left, right, weight = self.cell_of(point)
        if weight == 0.0:
            return float(values[left])
        return float((1.0 - weight) * values[left] + weight * values[right])

    def interpolate_many(self, values, edge_ids, offsets):
        """Vectorized :meth:`interpolate` over parallel arrays of edge ids and offsets."""
        values = np.asarray(values, dtype=float)
        edge_ids = np.asarray(edge_ids, dtype=int)
        offsets = np.asarray(offsets, dtype=float)
        result = np.empty(offsets.shape, dtype=float)
        for edge_id in np.unique(edge_ids):
            mask = edge_ids == edge_id
            result[mask] = np.interp(
                offsets[mask],
                self.edge_offsets[int(edge_id)],
                values[self.edge_nodes[int(edge_id)]],
            )
        return result

    def on_nodes(self, func):
        """Evaluate ``func(point)`` at every node."""
        return np.array([func(point) for point in self.points], dtype=float)


def build_lattice(graph, dx):
    """Subdivide every edge of ``graph`` into ``ceil(length / dx)`` equal cells."""
    dx = float(dx)
    if not np.isfinite(dx) or dx <= 0:
        raise InputError("Lattice spacing must be positive", dx=dx)

    per_edge = {}
    unique = set()
    for edge in graph.edges:
        cells = max(1, math.ceil(edge.length / dx - 1e-9))
        offsets = np.linspace(0.0, edge.length, cells + 1)
        offsets[-1] = edge.length
        keys = [GraphPoint(edge.id, float(offset)) for offset in offsets[1:-1]]
        keys.insert(0, graph.vertex_point(edge.u))
        keys.append(graph.vertex_point(edge.v))
        per_edge[edge.id] = (offsets, keys)
        unique.update(keys)

    points = tuple(sorted(unique))
    index = {point: i for i, point in enumerate(points)}
    edge_nodes = {}
    edge_offsets = {}
    neighbors = [[] for _ in points]
    for edge_id, (offsets, keys) in per_edge.items():
        nodes = np.array([index[key] for key in keys], dtype=int)
        nodes.setflags(write=False)
        offsets.setflags(write=False)
        edge_nodes[edge_id] = nodes
        edge_offsets[edge_id] = offsets
        step = float(offsets[1] - offsets[0])
        for a, b in zip(nodes[:-1], nodes[1:]):
            neighbors[a].append((int(b), step))
            neighbors[b].append((int(a), step))

    lattice = SpaceLattice(
        graph=graph,
        dx=dx,
        points=points,
        edge_nodes=edge_nodes,
        edge_offsets=edge_offsets,
        neighbors=tuple(tuple(items) for items in neighbors),
        _index=index,
    )
    logger.debug("Built lattice with %d nodes (dx=%g)", len(points), dx)
    return lattice
