"""
Admissible curves: piecewise constant-speed motions along graph paths,
constant after the last breakpoint.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

from .paths import legs_end, legs_start, merge_legs, path_length, path_point, path_positions, trim_legs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Segment:
    duration: float
    speed: float
    legs: tuple = ()

    @property
    def length(self):
        return path_length(self.legs)


@dataclass(frozen=True, eq=False)
class AdmissibleCurve:
    graph: object
    start: object
    segments: tuple = ()

    def __post_init__(self):
        start = self.graph.canonical(self.start)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "segments", tuple(self.segments))
        tol = hj_settings.CURVE_TOLERANCE
        current = start
        for index, segment in enumerate(self.segments):
            if not segment.duration > 0 or not np.isfinite(segment.duration):
                raise InputError("Segment durations must be positive", segment=index)
            if segment.speed < 0 or not np.isfinite(segment.speed):
                raise InputError("Segment speeds must be nonnegative", segment=index)
            expected = segment.speed * segment.duration
            if abs(segment.length - expected) > tol * max(1.0, expected):
                raise InputError(
                    "Segment path length differs from speed x duration",
                    segment=index,
                    length=segment.length,
                    expected=expected,
                )
            if not segment.legs:
                continue
            for leg in segment.legs:
                edge = self.graph.edge(leg.edge)
                for offset in (leg.start, leg.end):
                    if offset < -tol or offset > edge.length + tol:
                        raise InputError("Leg leaves its edge", segment=index, edge=leg.edge)
            position = current
            for leg in segment.legs:
                entry = self.graph.point_at(leg.edge, leg.start)
                if self.graph.geodesic_distance(position, entry) > tol:
                    raise InputError("Curve is not continuous", segment=index)
                position = self.graph.point_at(leg.edge, leg.end)
            current = position

    def __repr__(self):
        return f"AdmissibleCurve(start={self.start}, segments={len(self.segments)})"

    @classmethod
    def constant(cls, graph, point):
        return cls(graph, point, ())

    @property
    def is_constant(self):
        return all(segment.speed == 0 or not segment.legs for segment in self.segments)

    @cached_property
    def breakpoints(self):
        """Times r_0 = 0 < r_1 < ... at which the speed may change."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    @property
    def horizon(self):
        return float(self.breakpoints[-1])

    @cached_property
    def _segment_starts(self):
        points = [self.start]
        for segment in self.segments:
            points.append(self.graph.point_at(*_last(segment.legs)) if segment.legs else points[-1])
        return points

    @property
    def end(self):
        return self._segment_starts[-1]

    @property
    def speeds(self):
        return [segment.speed for segment in self.segments]

    @property
    def max_speed(self):
        return max(self.speeds, default=0.0)

    def _locate(self, h):
        h = float(h)
        if h < 0 or np.isnan(h):
            raise InputError("Curve time must be nonnegative", h=h)
        index = int(np.searchsorted(self.breakpoints, h, side="right")) - 1
        return index, h - self.breakpoints[index]

    def evaluate(self, h):
        """Position at time ``h``; the curve rests at its end point after the horizon."""
        index, local = self._locate(h)
        if index >= len(self.segments):
            return self.end
        segment = self.segments[index]
        if not segment.legs:
            return self._segment_starts[index]
        return path_point(self.graph, self._segment_starts[index], segment.legs, segment.speed * local)

    def speed_at(self, h):
        """Right-continuous metric derivative |xi'|(h+0)."""
        index, _ = self._locate(h)
        if index >= len(self.segments):
            return 0.0
        return self.segments[index].speed

    def reparametrize(self):
        return ArcLengthProfile.from_curve(self)


def _last(legs):
    end = legs_end(legs)
    return end.edge, end.offset


@dataclass(frozen=True, eq=False)
class ArcLengthProfile:
    """
    tau(h) = integral of the speed over [0, h] and the unit-speed curve
    xi_hat with xi = xi_hat(tau).
    """

    graph: object
    start: object
    times: np.ndarray
    arcs: np.ndarray
    legs: tuple

    @classmethod
    def from_curve(cls, curve):
        arcs = np.concatenate(
            [[0.0], np.cumsum([s.speed * s.duration for s in curve.segments])]
        )
        legs = merge_legs([leg for segment in curve.segments for leg in segment.legs])
        return cls(curve.graph, curve.start, curve.breakpoints, arcs, legs)

    @property
    def total_length(self):
        return float(self.arcs[-1])

    def tau(self, h):
        return float(np.interp(float(h), self.times, self.arcs))

    def unit_curve(self, s):
        """xi_hat(s), constant beyond the total length."""
        s = min(max(float(s), 0.0), self.total_length)
        if not self.legs:
            return self.start
        return path_point(self.graph, self.start, self.legs, s)

    def unit_curve_many(self, s):
        if not self.legs:
            start = self.start
            s = np.asarray(s, dtype=float)
            return np.full(s.shape, start.edge), np.full(s.shape, start.offset)
        return path_positions(self.legs, np.clip(s, 0.0, self.total_length))


def truncate(curve, h):
    """The curve restricted to ``[0, h]`` (resting afterwards)."""
    h = float(h)
    segments = []
    elapsed = 0.0
    for segment in curve.segments:
        if elapsed >= h:
            break
        take = min(segment.duration, h - elapsed)
        if take > 0:
            segments.append(_partial(segment, 0.0, take))
        elapsed += segment.duration
    return AdmissibleCurve(curve.graph, curve.start, segments)


def _partial(segment, begin, finish):
    """Piece of ``segment`` between local times ``begin`` and ``finish``."""
    duration = finish - begin
    if not segment.legs:
        return Segment(duration, segment.speed, ())
    legs = trim_legs(segment.legs, segment.speed * begin, segment.speed * finish)
    if not legs:
        return Segment(duration, 0.0, ())
    # the piece inherits the parent speed unchanged
    return Segment(duration, segment.speed, legs)


def shift(curve, h):
    """The curve r -> xi(r + h)."""
    index, local = curve._locate(h)
    start = curve.evaluate(h)
    segments = []
    if index < len(curve.segments):
        current = curve.segments[index]
        if current.duration - local > 0:
            segments.append(_partial(current, local, current.duration))
        segments.extend(curve.segments[index + 1 :])
    return AdmissibleCurve(curve.graph, start, segments)


def concatenate(first, h, second):
    """xi on [0, h] followed by ``second``, which must start at xi(h)."""
    joint = first.evaluate(h)
    if first.graph.geodesic_distance(joint, second.start) > hj_settings.CURVE_TOLERANCE:
        raise InputError("Second curve must start where the first is at time h", h=h)
    head = truncate(first, h)
    segments = list(head.segments)
    rest = float(h) - head.horizon
    if rest > 0:
        segments.append(Segment(rest, 0.0, ()))
    segments.extend(second.segments)
    return AdmissibleCurve(first.graph, first.start, segments)


def at_constant_speed(curve, v):
    """The same geometric path run at the single speed ``v``, then at rest."""
    profile = curve.reparametrize()
    if profile.total_length == 0:
        return AdmissibleCurve.constant(curve.graph, curve.start)
    v = float(v)
    if not v > 0:
        raise InputError("A moving curve needs a positive speed", v=v)
    return AdmissibleCurve(
        curve.graph,
        curve.start,
        [Segment(profile.total_length / v, v, profile.legs)],
    )


def _segment_positions(curve, index, times):
    segment = curve.segments[index]
    start = curve._segment_starts[index]
    if not segment.legs:
        times = np.asarray(times, dtype=float)
        return np.full(times.shape, start.edge), np.full(times.shape, start.offset)
    return path_positions(segment.legs, segment.speed * np.asarray(times, dtype=float))


def action(curve, lagrangian, h, n_quad=None):
    """
    Integral of L(xi(r), |xi'|(r)) over [0, h] by composite midpoint
    quadrature with ``n_quad`` panels per segment piece; +inf as soon as one
    sample is +inf.
    """
    h = float(h)
    if h < 0:
        raise InputError("Action horizon must be nonnegative", h=h)
    n_quad = hj_settings.QUADRATURE_PANELS if n_quad is None else int(n_quad)
    if h == 0:
        return 0.0

    graph = curve.graph
    homogeneous = lagrangian.is_homogeneous
    total = 0.0
    elapsed = 0.0
    for index, segment in enumerate(curve.segments):
        if elapsed >= h:
            break
        piece = min(segment.duration, h - elapsed)
        elapsed += segment.duration
        if homogeneous:
            cost = piece * lagrangian.speed_cost(segment.speed)
        else:
            midpoints = (np.arange(n_quad) + 0.5) * (piece / n_quad)
            edge_ids, offsets = _segment_positions(curve, index, midpoints)
            values = lagrangian.value_many(graph, edge_ids, offsets, segment.speed)
            cost = np.inf if np.any(np.isinf(values)) else float(values.sum()) * piece / n_quad
        if cost == np.inf:
            return np.inf
        total += cost

    if h > elapsed:
        rest = h - max(elapsed, curve.horizon)
        if rest > 0:
            if homogeneous:
                cost = rest * lagrangian.speed_cost(0.0)
            else:
                cost = rest * lagrangian.value(curve.end, 0.0)
            if cost == np.inf:
                return np.inf
            total += cost
    return float(total)
