"""
Paths on a metric graph as sequences of legs, each leg a straight run along
one edge between two offsets.
"""

from dataclasses import dataclass

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError
from apps.metric_graph.graph import GraphPoint


@dataclass(frozen=True)
class Leg:
    edge: int
    start: float
    end: float

    @property
    def length(self):
        return abs(self.end - self.start)

    @property
    def direction(self):
        return 1.0 if self.end >= self.start else -1.0

    def offset_at(self, s):
        return self.start + self.direction * s

    def reversed(self):
        return Leg(self.edge, self.end, self.start)


def path_length(legs):
    return float(sum(leg.length for leg in legs))


def path_point(graph, start, legs, s):
    """Point at arc length ``s`` along ``legs``; clamps to the ends of the path."""
    if not legs or s <= 0:
        return graph.canonical(start) if not legs else graph.point_at(legs[0].edge, legs[0].start)
    for leg in legs:
        if s <= leg.length:
            return graph.point_at(leg.edge, leg.offset_at(s))
        s -= leg.length
    last = legs[-1]
    return graph.point_at(last.edge, last.end)


def path_positions(legs, s):
    """Vectorized :func:`path_point` returning parallel arrays of edge ids and offsets."""
    s = np.asarray(s, dtype=float)
    lengths = np.array([leg.length for leg in legs], dtype=float)
    bounds = np.concatenate([[0.0], np.cumsum(lengths)])
    index = np.clip(np.searchsorted(bounds, s, side="right") - 1, 0, len(legs) - 1)
    local = np.clip(s - bounds[index], 0.0, lengths[index])
    starts = np.array([leg.start for leg in legs], dtype=float)
    directions = np.array([leg.direction for leg in legs], dtype=float)
    edges = np.array([leg.edge for leg in legs], dtype=int)
    ends = np.array([leg.end for leg in legs], dtype=float)
    offsets = starts[index] + directions[index] * local
    # Keep offsets inside each edge despite rounding.
    offsets = np.clip(offsets, np.minimum(starts, ends)[index], np.maximum(starts, ends)[index])
    return edges[index], offsets


def trim_legs(legs, s_from, s_to):
    """Sub-path covering arc lengths ``[s_from, s_to]``."""
    trimmed = []
    position = 0.0
    for leg in legs:
        begin, finish = position, position + leg.length
        position = finish
        low, high = max(begin, s_from), min(finish, s_to)
        if high - low <= 0:
            continue
        trimmed.append(Leg(leg.edge, leg.offset_at(low - begin), leg.offset_at(high - begin)))
    return tuple(trimmed)


def merge_legs(legs):
    """Join consecutive legs that continue along the same edge in the same direction."""
    merged = []
    for leg in legs:
        if leg.length == 0:
            continue
        if merged:
            last = merged[-1]
            if (
                last.edge == leg.edge
                and last.direction == leg.direction
                and abs(last.end - leg.start) <= hj_settings.CURVE_TOLERANCE
            ):
                merged[-1] = Leg(last.edge, last.start, leg.end)
                continue
        merged.append(leg)
    return tuple(merged)


def departures(graph, point):
    """
    Ways to leave ``point``: ``(edge id, direction)`` pairs, direction +1
    moving towards the edge's second endpoint.
    """
    point = graph.canonical(point)
    vertex = graph.vertex_at(point)
    if vertex is None:
        return [(point.edge, 1.0), (point.edge, -1.0)]
    return [(edge_id, 1.0 if end == 0 else -1.0) for edge_id, end in graph.incident(vertex)]


def _continuations(graph, edge_id, direction):
    """Options on reaching the far end of ``edge_id``: other incident edges, or bounce back at a leaf."""
    edge = graph.edges[edge_id]
    vertex = edge.v if direction > 0 else edge.u
    options = [
        (other, 1.0 if end == 0 else -1.0)
        for other, end in graph.incident(vertex)
        if other != edge_id
    ]
    if not options:
        options = [(edge_id, -direction)]
    return options


def _walk(graph, edge_id, offset, direction, length, chooser, legs):
    edge = graph.edges[edge_id]
    while True:
        room = edge.length - offset if direction > 0 else offset
        if length <= room:
            end = offset + direction * length
            legs.append(Leg(edge_id, offset, end))
            return legs, graph.point_at(edge_id, end)
        far = edge.length if direction > 0 else 0.0
        legs.append(Leg(edge_id, offset, far))
        length -= room
        options = _continuations(graph, edge_id, direction)
        edge_id, direction = options[chooser(options)]
        edge = graph.edges[edge_id]
        offset = 0.0 if direction > 0 else edge.length


def _start_offset(graph, point, edge_id):
    """Offset of ``point`` on ``edge_id``, which is either its own edge or touches its vertex."""
    if point.edge == edge_id:
        return point.offset
    edge = graph.edges[edge_id]
    vertex = graph.vertex_at(point)
    return 0.0 if edge.u == vertex else edge.length


def travel(graph, point, length, chooser, departure=None):
    """
    Walk ``length`` along the graph from ``point``.

    ``chooser(options)`` returns the index of the option to take whenever a
    choice arises (at the start unless ``departure`` is given, and at every
    vertex passed). Walks enter another incident edge at junctions and bounce
    back at leaves. Returns ``(legs, end point)``.
    """
    point = graph.canonical(point)
    length = float(length)
    if length < 0:
        raise InputError("Travel length must be nonnegative", length=length)
    if length == 0:
        return (), point
    if departure is None:
        options = departures(graph, point)
        departure = options[chooser(options)]
    edge_id, direction = departure
    offset = _start_offset(graph, point, edge_id)
    legs, end = _walk(graph, edge_id, offset, direction, length, chooser, [])
    return merge_legs(legs), end


def endpoints(graph, point, length):
    """
    Every walk of ``length`` from ``point``, enumerating all choices.

    Returns a list of ``(legs, end point)`` sorted by the edge of the first leg.
    """
    point = graph.canonical(point)
    if length == 0:
        return [((), point)]

    results = []

    def explore(edge_id, offset, direction, remaining, legs):
        edge = graph.edges[edge_id]
        room = edge.length - offset if direction > 0 else offset
        if remaining <= room:
            end = offset + direction * remaining
            results.append(
                (merge_legs(legs + [Leg(edge_id, offset, end)]), graph.point_at(edge_id, end))
            )
            return
        far = edge.length if direction > 0 else 0.0
        passed = legs + [Leg(edge_id, offset, far)]
        for next_edge, next_direction in _continuations(graph, edge_id, direction):
            start = 0.0 if next_direction > 0 else graph.edges[next_edge].length
            explore(next_edge, start, next_direction, remaining - room, passed)

    for edge_id, direction in departures(graph, point):
        explore(edge_id, _start_offset(graph, point, edge_id), direction, float(length), [])
    results.sort(key=lambda item: (item[0][0].edge, item[0][0].direction))
    return results


def legs_start(legs):
    return GraphPoint(legs[0].edge, legs[0].start)


def legs_end(legs):
    return GraphPoint(legs[-1].edge, legs[-1].end)
