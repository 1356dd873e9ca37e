"""
Tests for the metric_graph app.
"""

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.core.exceptions import InputError

from .factories import (
    MetricGraphFactory,
    PathGraphFactory,
    SpaceLatticeFactory,
    StarGraphFactory,
    TriangleGraphFactory,
    random_graph,
    random_point,
)
from .graph import GraphPoint, MetricGraph
from .lattice import build_lattice


def brute_force_distance(graph, a, b):
    """Shortest path length over every simple path of the graph with ``a`` and ``b`` spliced in."""
    anchors = {}
    for name, point in (("a", a), ("b", b)):
        vertex = graph.vertex_at(point)
        anchors[name] = ("v", vertex) if vertex is not None else ("p", name)

    if anchors["a"] == anchors["b"] or a == b:
        return 0.0

    expanded = nx.Graph()
    for edge in graph.edges:
        stops = [(0.0, ("v", edge.u)), (edge.length, ("v", edge.v))]
        for name, point in (("a", a), ("b", b)):
            if anchors[name][0] == "p" and point.edge == edge.id:
                stops.append((point.offset, anchors[name]))
        stops.sort(key=lambda item: item[0])
        for (o1, n1), (o2, n2) in zip(stops[:-1], stops[1:]):
            expanded.add_edge(n1, n2, weight=o2 - o1)

    return min(
        nx.path_weight(expanded, path, "weight")
        for path in nx.all_simple_paths(expanded, anchors["a"], anchors["b"])
    )


@pytest.mark.unit
class TestGeodesicDistance:
    def test_single_edge_end_to_end(self):
        graph = MetricGraphFactory(edges=[("a", "b", 2.0)])
        assert graph.geodesic_distance(GraphPoint(0, 0.0), GraphPoint(0, 2.0)) == 2.0

    def test_distance_to_self_is_zero(self):
        graph = StarGraphFactory()
        point = GraphPoint(1, 0.3)
        assert graph.geodesic_distance(point, point) == 0.0

    def test_triangle_goes_around_long_edge(self):
        graph = TriangleGraphFactory()
        x_point = GraphPoint(2, 0.0)
        z_point = GraphPoint(2, 3.0)
        assert graph.geodesic_distance(x_point, z_point) == pytest.approx(2.0, abs=1e-12)

    def test_vertex_has_one_canonical_point(self):
        graph = StarGraphFactory()
        center_on_each_arm = [graph.canonical(GraphPoint(edge.id, 0.0)) for edge in graph.edges]
        assert len(set(center_on_each_arm)) == 1
        assert center_on_each_arm[0] == graph.vertex_point("c")

    def test_parallel_edges_use_the_shorter_one(self):
        graph = MetricGraph(["a", "b"], [("a", "b", 3.0), ("a", "b", 1.0)])
        assert graph.vertex_distance("a", "b") == 1.0
        # Interior points of the long edge may still leave through the short one.
        assert graph.geodesic_distance(GraphPoint(0, 0.5), GraphPoint(0, 2.5)) == 2.0

    def test_interior_points_across_junction(self):
        graph = StarGraphFactory()
        a = GraphPoint(0, 0.25)
        b = GraphPoint(2, 0.5)
        assert graph.geodesic_distance(a, b) == pytest.approx(0.75)

    def test_invalid_point_raises(self):
        graph = MetricGraphFactory()
        with pytest.raises(InputError):
            graph.geodesic_distance(GraphPoint(0, 1.5), GraphPoint(0, 0.0))
        with pytest.raises(InputError):
            graph.geodesic_distance(GraphPoint(3, 0.0), GraphPoint(0, 0.0))

    def test_distance_matrix_matches_pointwise(self):
        graph = random_graph(seed=7, n_vertices=5, extra_edges=2)
        rng = np.random.default_rng(3)
        points = [random_point(graph, rng) for _ in range(12)]
        matrix = graph.distance_matrix(points)
        for i, a in enumerate(points):
            for j, b in enumerate(points):
                assert matrix[i, j] == pytest.approx(graph.geodesic_distance(a, b), abs=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_simple_path_enumeration(self, seed):
        graph = random_graph(seed=seed, n_vertices=4, extra_edges=2)
        assert len(graph.edges) <= 6
        rng = np.random.default_rng(seed + 100)
        for _ in range(10):
            a = random_point(graph, rng)
            b = random_point(graph, rng)
            assert graph.geodesic_distance(a, b) == pytest.approx(
                brute_force_distance(graph, a, b), abs=1e-12
            )


@pytest.mark.unit
class TestMetricAxioms:
    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_metric_axioms_on_random_triples(self, seed):
        graph = random_graph(seed=seed, n_vertices=5, extra_edges=3)
        rng = np.random.default_rng(seed)
        for _ in range(100):
            a, b, c = (random_point(graph, rng) for _ in range(3))
            d_ab = graph.geodesic_distance(a, b)
            assert d_ab == pytest.approx(graph.geodesic_distance(b, a), abs=1e-12)
            assert (d_ab == 0.0) == (a == b)
            assert graph.geodesic_distance(a, c) <= d_ab + graph.geodesic_distance(b, c) + 1e-12


@pytest.mark.unit
class TestGraphValidation:
    def test_disconnected_graph_rejected(self):
        with pytest.raises(InputError):
            MetricGraph([0, 1, 2, 3], [(0, 1, 1.0), (2, 3, 1.0)])

    @pytest.mark.parametrize("length", [0.0, -1.0, float("inf")])
    def test_non_positive_length_rejected(self, length):
        with pytest.raises(InputError):
            MetricGraph([0, 1], [(0, 1, length)])

    def test_self_loop_rejected(self):
        with pytest.raises(InputError):
            MetricGraph([0, 1], [(0, 1, 1.0), (1, 1, 1.0)])

    def test_unknown_vertex_rejected(self):
        with pytest.raises(InputError):
            MetricGraph([0, 1], [(0, 2, 1.0)])

    def test_empty_graph_rejected(self):
        with pytest.raises(InputError):
            MetricGraph([0], [])


@pytest.mark.unit
class TestBuildLattice:
    def test_uniform_subdivision(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        assert [point.offset for point in lattice.points] == [0.0, 0.5, 1.0]

    def test_star_center_counted_once(self):
        lattice = build_lattice(StarGraphFactory(), 0.5)
        assert lattice.size == 7

    def test_ceil_rule(self):
        lattice = build_lattice(MetricGraphFactory(), 0.4)
        offsets = [point.offset for point in lattice.points]
        assert offsets == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0], abs=1e-15)

    @pytest.mark.parametrize("dx", [0.0, -0.1])
    def test_non_positive_spacing_rejected(self, dx):
        with pytest.raises(InputError):
            build_lattice(MetricGraphFactory(), dx)

    def test_deterministic(self):
        graph = random_graph(seed=11)
        assert build_lattice(graph, 0.1).points == build_lattice(graph, 0.1).points

    def test_sorted_by_edge_then_offset(self):
        lattice = build_lattice(StarGraphFactory(arms=(1.0, 0.5, 2.0)), 0.3)
        assert list(lattice.points) == sorted(lattice.points)

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=1000),
        dx=st.floats(min_value=0.05, max_value=1.5),
    )
    def test_lattice_invariants(self, seed, dx):
        graph = random_graph(seed=seed)
        lattice = build_lattice(graph, dx)

        vertex_nodes = [lattice.locate(graph.vertex_point(v)) for v in graph.vertices]
        assert len(set(vertex_nodes)) == len(graph.vertices)
        assert len(set(lattice.points)) == lattice.size

        for edge in graph.edges:
            nodes = lattice.edge_nodes[edge.id]
            spacing = edge.length / (len(nodes) - 1)
            assert spacing <= dx * (1 + 1e-9)
            offsets = lattice.edge_offsets[edge.id]
            assert np.allclose(np.diff(offsets), spacing, rtol=0.0, atol=1e-12)
            assert offsets[0] == 0.0 and offsets[-1] == edge.length
            for a, b in zip(nodes[:-1], nodes[1:]):
                assert lattice.distances[a, b] <= spacing + 1e-12

    def test_spacing_is_measured_along_the_edge(self):
        lattice = build_lattice(TriangleGraphFactory(), 3.0)
        long_edge = next(edge for edge in lattice.graph.edges if edge.length == 3.0)
        a, b = lattice.edge_nodes[long_edge.id]
        assert lattice.cell_length(long_edge.id) == 3.0
        assert lattice.distances[a, b] == pytest.approx(2.0)

    def test_interpolate_exact_at_nodes_and_linear_between(self):
        lattice = SpaceLatticeFactory(graph=PathGraphFactory(), dx=0.5)
        values = np.arange(lattice.size, dtype=float) ** 2
        for i, point in enumerate(lattice.points):
            assert lattice.interpolate(values, point) == values[i]
        left = lattice.locate(GraphPoint(0, 0.5))
        right = lattice.locate(GraphPoint(0, 1.0))
        expected = 0.5 * (values[left] + values[right])
        assert lattice.interpolate(values, GraphPoint(0, 0.75)) == pytest.approx(expected)

    def test_interpolate_many_matches_scalar(self):
        lattice = SpaceLatticeFactory(graph=StarGraphFactory(), dx=0.2)
        values = np.sin(np.arange(lattice.size, dtype=float))
        edge_ids = np.array([0, 1, 2, 2])
        offsets = np.array([0.13, 0.5, 0.0, 0.99])
        expected = [
            lattice.interpolate(values, GraphPoint(int(e), float(o)))
            for e, o in zip(edge_ids, offsets)
        ]
        assert lattice.interpolate_many(values, edge_ids, offsets) == pytest.approx(expected)

    def test_locate(self):
        lattice = SpaceLatticeFactory(graph=StarGraphFactory(), dx=0.5)
        assert lattice.locate(GraphPoint(1, 0.5)) is not None
        assert lattice.locate(GraphPoint(1, 0.25)) is None
        assert lattice.locate(GraphPoint(2, 0.0)) == lattice.vertex_nodes["c"]
