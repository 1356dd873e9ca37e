"""
Factory classes for testing the metric_graph app.
"""

import factory
import numpy as np

from .graph import GraphPoint, MetricGraph
from .lattice import build_lattice


class MetricGraphFactory(factory.Factory):
    """Factory for a single edge of length 1."""

    class Meta:
        model = MetricGraph

    vertices = factory.LazyFunction(lambda: ["a", "b"])
    edges = factory.LazyFunction(lambda: [("a", "b", 1.0)])


class PathGraphFactory(MetricGraphFactory):
    """Line-like graph ``0 - 1 - ... - n`` with the given edge lengths."""

    class Params:
        lengths = (1.0, 1.0)

    vertices = factory.LazyAttribute(lambda o: list(range(len(o.lengths) + 1)))
    edges = factory.LazyAttribute(
        lambda o: [(i, i + 1, length) for i, length in enumerate(o.lengths)]
    )


class StarGraphFactory(MetricGraphFactory):
    """Star with a center ``"c"`` and leaves ``"l0"``, ``"l1"``, ..."""

    class Params:
        arms = (1.0, 1.0, 1.0)

    vertices = factory.LazyAttribute(lambda o: ["c"] + [f"l{i}" for i in range(len(o.arms))])
    edges = factory.LazyAttribute(
        lambda o: [("c", f"l{i}", length) for i, length in enumerate(o.arms)]
    )


class TriangleGraphFactory(MetricGraphFactory):
    class Params:
        lengths = (1.0, 1.0, 3.0)

    vertices = factory.LazyFunction(lambda: ["x", "y", "z"])
    edges = factory.LazyAttribute(
        lambda o: [("x", "y", o.lengths[0]), ("y", "z", o.lengths[1]), ("x", "z", o.lengths[2])]
    )


class SpaceLatticeFactory(factory.Factory):
    class Meta:
        model = build_lattice

    graph = factory.SubFactory(MetricGraphFactory)
    dx = 0.25


def random_graph(seed, n_vertices=4, extra_edges=2, length_range=(0.2, 2.0)):
    """Connected graph without parallel edges: a random spanning tree plus a few chords."""
    rng = np.random.default_rng(seed)
    vertices = list(range(n_vertices))
    edges = []
    pairs = set()
    for v in range(1, n_vertices):
        u = int(rng.integers(0, v))
        pairs.add((u, v))
        edges.append((u, v, float(rng.uniform(*length_range))))
    candidates = [
        (u, v) for u in range(n_vertices) for v in range(u + 1, n_vertices) if (u, v) not in pairs
    ]
    rng.shuffle(candidates)
    for u, v in candidates[:extra_edges]:
        edges.append((u, v, float(rng.uniform(*length_range))))
    return MetricGraph(vertices, edges)


def random_point(graph, rng):
    edge = graph.edges[int(rng.integers(0, len(graph.edges)))]
    if rng.random() < 0.2:
        return graph.canonical(GraphPoint(edge.id, float(rng.choice([0.0, edge.length]))))
    return graph.canonical(GraphPoint(edge.id, float(rng.uniform(0.0, edge.length))))
