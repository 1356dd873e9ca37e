"""
Initial data u0 for the Cauchy problem.

Closed forms evaluate exactly at any graph point; tables interpolate their
node values along edges.
"""

import logging

import numpy as np

from apps.core.exceptions import InputError

logger = logging.getLogger(__name__)


class InitialDatum:
    kind = None
    closed_form = True

    def at(self, point):
        raise NotImplementedError

    def on_lattice(self, lattice):
        return lattice.on_nodes(self.at)

    def at_many(self, points):
        return np.array([self.at(point) for point in points], dtype=float)

    def inf(self, lattice):
        return float(np.min(self.on_lattice(lattice)))

    def sup(self, lattice):
        return float(np.max(self.on_lattice(lattice)))

    def lipschitz_estimate(self, lattice):
        """Largest difference quotient between neighbouring lattice nodes."""
        values = self.on_lattice(lattice)
        return max(
            (abs(values[i] - values[j]) / distance for i, j, distance in lattice.adjacent_pairs),
            default=0.0,
        )

    def modulus(self, lattice, deltas):
        """
        Empirical modulus of continuity: for every delta, the largest
        |u0(x) - u0(y)| over node pairs with d(x, y) <= delta.
        """
        values = self.on_lattice(lattice)
        gaps = np.abs(values[:, None] - values[None, :])
        distances = lattice.distances
        result = []
        for delta in deltas:
            close = distances <= float(delta) * (1.0 + 1e-12)
            result.append(float(gaps[close].max()))
        return result


class ConstantDatum(InitialDatum):
    kind = "constant"

    def __init__(self, value):
        value = float(value)
        if not np.isfinite(value):
            raise InputError("Initial value must be finite", value=value)
        self.value = value

    def __repr__(self):
        return f"ConstantDatum({self.value!r})"

    def at(self, point):
        return self.value

    def on_lattice(self, lattice):
        return np.full(lattice.size, self.value)


class DistanceToVertex(InitialDatum):
    """u0(x) = scale * d(x, vertex)."""

    kind = "distance_to_vertex"

    def __init__(self, graph, vertex, scale=1.0):
        scale = float(scale)
        if not np.isfinite(scale):
            raise InputError("Scale must be finite", scale=scale)
        self.graph = graph
        self.vertex = vertex
        self.scale = scale
        self.anchor = graph.vertex_point(vertex)

    def __repr__(self):
        return f"DistanceToVertex({self.vertex!r}, scale={self.scale!r})"

    def _distances(self, points):
        return self.graph.distance_matrix(points, [self.anchor])[:, 0]

    def at(self, point):
        return self.scale * self.graph.geodesic_distance(point, self.anchor)

    def at_many(self, points):
        return self.scale * self._distances(points)

    def on_lattice(self, lattice):
        return self.at_many(lattice.points)


class Bump(DistanceToVertex):
    """u0(x) = height * max(0, 1 - d(x, vertex) / radius)."""

    kind = "bump"

    def __init__(self, graph, vertex, radius, height=1.0):
        super().__init__(graph, vertex)
        radius = float(radius)
        if not radius > 0 or not np.isfinite(radius):
            raise InputError("Bump radius must be positive", radius=radius)
        height = float(height)
        if not np.isfinite(height):
            raise InputError("Bump height must be finite", height=height)
        self.radius = radius
        self.height = height

    def __repr__(self):
        return f"Bump({self.vertex!r}, radius={self.radius!r}, height={self.height!r})"

    def _profile(self, distance):
        return self.height * np.maximum(0.0, 1.0 - np.asarray(distance) / self.radius)

    def at(self, point):
        return float(self._profile(self.graph.geodesic_distance(point, self.anchor)))

    def at_many(self, points):
        return self._profile(self._distances(points))


class TableDatum(InitialDatum):
    kind = "table"
    closed_form = False

    def __init__(self, lattice, values):
        values = np.array(values, dtype=float)
        if values.shape != (lattice.size,):
            raise InputError(
                "Initial table must give one value per lattice node",
                expected=lattice.size,
                got=values.shape,
            )
        if not np.all(np.isfinite(values)):
            raise InputError("Initial table values must be finite")
        values.setflags(write=False)
        self.lattice = lattice
        self.values = values

    def __repr__(self):
        return f"TableDatum(<{self.values.size} nodes>)"

    def at(self, point):
        return self.lattice.interpolate(self.values, point)

    def on_lattice(self, lattice):
        if lattice is self.lattice:
            return self.values.copy()
        return lattice.on_nodes(self.at)


class AffineDatum(InitialDatum):
    """u0(x) = scale * base(x) + shift; ``scale=-1`` gives the datum of the maximization problem."""

    def __init__(self, base, scale=1.0, shift=0.0):
        self.base = base
        self.scale = float(scale)
        self.shift = float(shift)
        self.kind = base.kind
        self.closed_form = base.closed_form

    def __repr__(self):
        return f"AffineDatum({self.base!r}, scale={self.scale!r}, shift={self.shift!r})"

    def at(self, point):
        return self.scale * self.base.at(point) + self.shift

    def at_many(self, points):
        return self.scale * self.base.at_many(points) + self.shift

    def on_lattice(self, lattice):
        return self.scale * self.base.on_lattice(lattice) + self.shift


def raised(datum, lattice, increments):
    """The table ``u0 + g`` on ``lattice`` for per-node increments ``g``."""
    increments = np.asarray(increments, dtype=float)
    return TableDatum(lattice, datum.on_lattice(lattice) + increments)
