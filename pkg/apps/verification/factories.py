"""
Factory classes for testing the verification app.
"""

import factory

from apps.hamiltonian.factories import EikonalHamiltonianFactory, QuadraticHamiltonianFactory
from apps.hj_solver.initial import ConstantDatum, DistanceToVertex
from apps.hj_solver.scheme import Problem
from apps.metric_graph.factories import PathGraphFactory, StarGraphFactory
from apps.metric_graph.lattice import build_lattice

from .suite import SuiteContext, VerificationParams


class EikonalStarProblemFactory(factory.Factory):
    """Eikonal ball problem on the three-arm star with u0 = distance to leaf ``l1``."""

    class Meta:
        model = Problem

    class Params:
        dx = 0.05

    graph = factory.LazyFunction(StarGraphFactory)
    lattice = factory.LazyAttribute(lambda o: build_lattice(o.graph, o.dx))
    hamiltonian = factory.LazyFunction(EikonalHamiltonianFactory)
    lagrangian = factory.LazyAttribute(lambda o: o.hamiltonian.lagrangian())
    u0 = factory.LazyAttribute(lambda o: DistanceToVertex(o.graph, "l1"))
    T = 0.5
    dt = 0.05


class ConstantProblemFactory(EikonalStarProblemFactory):
    graph = factory.LazyFunction(PathGraphFactory)
    u0 = factory.LazyFunction(lambda: ConstantDatum(2.0))


class HopfLaxProblemFactory(EikonalStarProblemFactory):
    class Params:
        dx = 0.02

    graph = factory.LazyFunction(lambda: PathGraphFactory(lengths=(1.0, 1.5, 1.5)))
    hamiltonian = factory.LazyFunction(QuadraticHamiltonianFactory)
    u0 = factory.LazyAttribute(lambda o: DistanceToVertex(o.graph, 0))
    T = 1.0
    dt = 0.01


class SuiteContextFactory(factory.Factory):
    class Meta:
        model = SuiteContext

    problem = factory.SubFactory(EikonalStarProblemFactory)
    grid = factory.LazyAttribute(lambda o: o.problem.solve())
    params = factory.LazyFunction(lambda: VerificationParams(curves=40, triples=10, probes=6))
    probes = factory.LazyFunction(list)
