"""
Factory classes for testing the hj_solver app.
"""

import factory

from apps.hamiltonian.factories import EikonalHamiltonianFactory, QuadraticHamiltonianFactory
from apps.metric_graph.factories import PathGraphFactory, StarGraphFactory
from apps.metric_graph.lattice import build_lattice

from .initial import Bump, ConstantDatum, DistanceToVertex
from .scheme import solve


class ConstantDatumFactory(factory.Factory):
    class Meta:
        model = ConstantDatum

    value = 1.5


class DistanceToVertexFactory(factory.Factory):
    class Meta:
        model = DistanceToVertex

    graph = factory.SubFactory(PathGraphFactory)
    vertex = 0
    scale = 1.0


class BumpFactory(factory.Factory):
    class Meta:
        model = Bump

    graph = factory.SubFactory(PathGraphFactory)
    vertex = 0
    radius = 0.5
    height = 1.0


class SolvedGridFactory(factory.Factory):
    """Eikonal solve on a two-edge path from u0 = distance to vertex 0."""

    class Meta:
        model = solve

    class Params:
        dx = 0.05

    graph = factory.SubFactory(PathGraphFactory)
    lattice = factory.LazyAttribute(lambda o: build_lattice(o.graph, o.dx))
    lagrangian = factory.LazyFunction(lambda: EikonalHamiltonianFactory().lagrangian())
    u0 = factory.LazyAttribute(lambda o: DistanceToVertex(o.graph, 0))
    T = 0.5
    dt = 0.05


class HopfLaxGridFactory(factory.Factory):
    """Quadratic Hamiltonian on the three-edge path of total length 4."""

    class Meta:
        model = solve

    class Params:
        dx = 0.02

    graph = factory.LazyFunction(lambda: PathGraphFactory(lengths=(1.0, 1.5, 1.5)))
    lattice = factory.LazyAttribute(lambda o: build_lattice(o.graph, o.dx))
    lagrangian = factory.LazyFunction(lambda: QuadraticHamiltonianFactory().lagrangian())
    u0 = factory.LazyAttribute(lambda o: DistanceToVertex(o.graph, 0))
    T = 1.0
    dt = 0.01


class EikonalStarGridFactory(factory.Factory):
    """Eikonal ball problem on the three-arm star, u0 = distance to leaf ``l1``."""

    class Meta:
        model = solve

    class Params:
        dx = 0.02

    graph = factory.LazyFunction(StarGraphFactory)
    lattice = factory.LazyAttribute(lambda o: build_lattice(o.graph, o.dx))
    lagrangian = factory.LazyFunction(lambda: EikonalHamiltonianFactory().lagrangian())
    u0 = factory.LazyAttribute(lambda o: DistanceToVertex(o.graph, "l1"))
    T = 1.0
    dt = 0.02
