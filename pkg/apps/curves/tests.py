"""
Tests for the curves app.
"""

import numpy as np
import pytest

from apps.core.exceptions import InputError
from apps.hamiltonian.factories import EikonalHamiltonianFactory, QuadraticHamiltonianFactory
from apps.hamiltonian.fields import NodeField
from apps.hamiltonian.lagrangian import lagrangian_floor
from apps.metric_graph.factories import MetricGraphFactory, PathGraphFactory, StarGraphFactory
from apps.metric_graph.graph import GraphPoint
from apps.metric_graph.lattice import build_lattice

from .curves import (
    AdmissibleCurve,
    Segment,
    action,
    at_constant_speed,
    concatenate,
    shift,
    truncate,
)
from .factories import ConstantCurveFactory, UnitEdgeCurveFactory
from .paths import Leg, endpoints, travel
from .sampling import sample_curves
from .serialization import dumps, loads


@pytest.fixture
def star():
    return StarGraphFactory()


@pytest.fixture
def varying_lagrangian(star):
    lattice = build_lattice(star, 0.1)
    f = NodeField.tabulated(lattice, 0.5 + 0.25 * np.sin(3.0 * np.arange(lattice.size) / lattice.size))
    hamiltonian = QuadraticHamiltonianFactory(f=f)
    return hamiltonian, lattice, hamiltonian.lagrangian()


@pytest.mark.unit
class TestEvaluate:
    def test_constant_curve(self):
        curve = ConstantCurveFactory()
        for h in (0.0, 0.3, 7.0):
            assert curve.evaluate(h) == GraphPoint(0, 0.5)

    def test_unit_speed_midpoint(self):
        curve = UnitEdgeCurveFactory()
        assert curve.evaluate(0.5) == GraphPoint(0, 0.5)

    def test_constant_tail(self):
        curve = AdmissibleCurve(
            MetricGraphFactory(),
            GraphPoint(0, 0.0),
            (Segment(0.25, 2.0, (Leg(0, 0.0, 0.5),)), Segment(0.5, 0.0, ())),
        )
        assert curve.evaluate(1.0) == GraphPoint(0, 0.5)
        assert curve.speed_at(0.0) == 2.0
        assert curve.speed_at(0.25) == 0.0

    def test_negative_time_rejected(self):
        with pytest.raises(InputError):
            UnitEdgeCurveFactory().evaluate(-0.1)

    def test_length_mismatch_rejected(self):
        with pytest.raises(InputError):
            AdmissibleCurve(
                MetricGraphFactory(), GraphPoint(0, 0.0), (Segment(1.0, 1.0, (Leg(0, 0.0, 0.5),)),)
            )

    def test_discontinuous_curve_rejected(self):
        with pytest.raises(InputError):
            AdmissibleCurve(
                MetricGraphFactory(), GraphPoint(0, 0.0), (Segment(0.5, 1.0, (Leg(0, 0.5, 1.0),)),)
            )


@pytest.mark.unit
class TestPaths:
    def test_travel_bounces_at_leaf(self):
        graph = MetricGraphFactory()
        legs, end = travel(graph, GraphPoint(0, 0.5), 1.0, lambda options: 0, departure=(0, 1.0))
        assert legs == (Leg(0, 0.5, 1.0), Leg(0, 1.0, 0.5))
        assert end == GraphPoint(0, 0.5)

    def test_travel_crosses_junction(self, star):
        legs, end = travel(star, GraphPoint(0, 0.5), 1.0, lambda options: 0, departure=(0, -1.0))
        assert len(legs) == 2
        assert end == GraphPoint(1, 0.5)

    def test_endpoints_from_center(self, star):
        results = endpoints(star, star.vertex_point("c"), 0.5)
        assert [end for _, end in results] == [GraphPoint(0, 0.5), GraphPoint(1, 0.5), GraphPoint(2, 0.5)]

    def test_endpoints_through_junction(self, star):
        results = endpoints(star, GraphPoint(0, 0.25), 0.5)
        ends = sorted(end for _, end in results)
        assert ends == [GraphPoint(0, 0.75), GraphPoint(1, 0.25), GraphPoint(2, 0.25)]


@pytest.mark.unit
class TestReparametrize:
    def test_constant_curve(self):
        profile = ConstantCurveFactory().reparametrize()
        assert profile.total_length == 0.0
        assert profile.tau(3.0) == 0.0
        assert profile.unit_curve(1.0) == GraphPoint(0, 0.5)

    def test_linear_tau(self):
        curve = UnitEdgeCurveFactory(graph=MetricGraphFactory(edges=[("a", "b", 3.0)]), speed=3.0)
        profile = curve.reparametrize()
        assert profile.total_length == 3.0
        assert profile.tau(0.5) == 1.5
        assert profile.unit_curve(2.0) == GraphPoint(0, 2.0)

    def test_two_speed_breakpoints(self):
        graph = MetricGraphFactory(edges=[("a", "b", 2.0)])
        curve = AdmissibleCurve(
            graph,
            GraphPoint(0, 0.0),
            (Segment(1.0, 1.0, (Leg(0, 0.0, 1.0),)), Segment(0.5, 2.0, (Leg(0, 1.0, 2.0),))),
        )
        profile = curve.reparametrize()
        assert list(profile.times) == [0.0, 1.0, 1.5]
        assert list(profile.arcs) == [0.0, 1.0, 2.0]
        rng = np.random.default_rng(0)
        for h in rng.uniform(0.0, 2.0, 20):
            assert graph.geodesic_distance(curve.evaluate(h), profile.unit_curve(profile.tau(h))) <= 1e-9

    def test_composition_identity_on_random_curves(self, star):
        rng = np.random.default_rng(42)
        curves = sample_curves(GraphPoint(0, 0.3), star, 2.0, 1.5, 500, seed=5)
        for curve in curves:
            profile = curve.reparametrize()
            for h in rng.uniform(0.0, 2.5, 50):
                recomposed = profile.unit_curve(profile.tau(h))
                assert star.geodesic_distance(curve.evaluate(h), recomposed) <= 1e-9

    def test_unit_speed_on_every_leg(self, star):
        rng = np.random.default_rng(1)
        for curve in sample_curves(star.vertex_point("l1"), star, 1.0, 2.0, 50, seed=9):
            profile = curve.reparametrize()
            start = 0.0
            for leg in profile.legs:
                s1, s2 = rng.uniform(start, start + leg.length, 2)
                distance = star.geodesic_distance(profile.unit_curve(s1), profile.unit_curve(s2))
                assert distance == pytest.approx(abs(s1 - s2), abs=1e-9)
                start += leg.length


@pytest.mark.unit
class TestAction:
    def test_constant_curve(self, varying_lagrangian):
        hamiltonian, lattice, lagrangian = varying_lagrangian
        point = lattice.points[7]
        curve = AdmissibleCurve.constant(lattice.graph, point)
        assert action(curve, lagrangian, 1.5) == pytest.approx(1.5 * lagrangian.value(point, 0.0))

    def test_zero_horizon(self):
        assert action(UnitEdgeCurveFactory(), QuadraticHamiltonianFactory().lagrangian(), 0.0) == 0.0

    def test_eikonal_slow_curves_are_free(self, star):
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        for curve in sample_curves(GraphPoint(1, 0.2), star, 1.0, 1.0, 50, seed=3):
            assert action(curve, lagrangian, 1.0) == 0.0

    def test_eikonal_fast_curve_costs_infinity(self):
        curve = UnitEdgeCurveFactory(speed=2.0, duration=0.5)
        assert action(curve, EikonalHamiltonianFactory().lagrangian(), 0.5) == np.inf

    def test_quadratic_unit_speed(self):
        curve = AdmissibleCurve(
            PathGraphFactory(lengths=(1.0, 1.5)),
            GraphPoint(0, 0.0),
            (Segment(2.0, 1.0, (Leg(0, 0.0, 1.0), Leg(1, 0.0, 1.0))),),
        )
        assert action(curve, QuadraticHamiltonianFactory().lagrangian(), 2.0) == pytest.approx(1.0)

    def test_additivity(self, star, varying_lagrangian):
        _, _, varying = varying_lagrangian
        homogeneous = QuadraticHamiltonianFactory().lagrangian()
        rng = np.random.default_rng(11)
        for curve in sample_curves(GraphPoint(0, 0.4), star, 2.0, 1.0, 20, seed=2):
            h1, h2 = rng.uniform(0.0, 1.0, 2)
            tail = shift(curve, h1)
            for lagrangian, tol in ((homogeneous, 1e-12), (varying, 1e-3)):
                whole = action(curve, lagrangian, h1 + h2)
                parts = action(curve, lagrangian, h1) + action(tail, lagrangian, h2)
                assert whole == pytest.approx(parts, abs=tol)

    def test_lower_bound(self, star, varying_lagrangian):
        hamiltonian, lattice, lagrangian = varying_lagrangian
        floor = lagrangian_floor(hamiltonian, lattice)
        for curve in sample_curves(GraphPoint(2, 0.9), star, 1.0, 3.0, 30, seed=4):
            assert action(curve, lagrangian, 1.0) >= floor - 1e-12


@pytest.mark.unit
class TestCurveOperations:
    def test_sample_single_curve_is_constant(self, star):
        curves = sample_curves(GraphPoint(0, 0.5), star, 1.0, 1.0, 1, seed=0)
        assert len(curves) == 1
        assert curves[0].segments == ()

    def test_sampling_is_deterministic(self, star):
        first = sample_curves(GraphPoint(0, 0.5), star, 1.0, 1.0, 20, seed=8)
        second = sample_curves(GraphPoint(0, 0.5), star, 1.0, 1.0, 20, seed=8)
        assert [dumps(c) for c in first] == [dumps(c) for c in second]

    def test_sampled_speeds_respect_cap(self, star):
        x = GraphPoint(1, 0.7)
        for curve in sample_curves(x, star, 1.0, 1.0, 100, seed=21):
            assert curve.start == x
            assert all(speed <= 1.0 for speed in curve.speeds)
            assert 1 <= len(curve.segments) <= 5 or curve.segments == ()

    def test_slow_curves_are_one_lipschitz(self, star):
        rng = np.random.default_rng(6)
        for curve in sample_curves(GraphPoint(0, 0.1), star, 1.5, 1.0, 50, seed=13):
            for a, b in rng.uniform(0.0, 1.5, (10, 2)):
                assert star.geodesic_distance(curve.evaluate(a), curve.evaluate(b)) <= abs(a - b) + 1e-9

    def test_shift(self):
        curve = UnitEdgeCurveFactory()
        tail = shift(curve, 0.25)
        assert tail.start == GraphPoint(0, 0.25)
        assert tail.horizon == pytest.approx(0.75)
        assert tail.evaluate(0.5) == curve.evaluate(0.75)

    @pytest.mark.parametrize("step", [0.02, 0.05, 0.1])
    def test_pieces_keep_the_recorded_speed(self, star, step):
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        legs = (Leg(0, 1.0, 0.0), Leg(1, 0.0, 1.0))
        curve = AdmissibleCurve(star, star.vertex_point("l0"), (Segment(2.0, 1.0, legs),))
        for h in step * np.arange(1, int(round(2.0 / step))):
            for piece in (shift(curve, h), truncate(curve, h), concatenate(curve, h, shift(curve, h))):
                assert all(segment.speed == 1.0 for segment in piece.segments if segment.legs)
                assert action(piece, lagrangian, piece.horizon) == 0.0

    def test_concatenate(self, star):
        first = AdmissibleCurve(star, GraphPoint(0, 0.0), (Segment(1.0, 0.5, (Leg(0, 0.0, 0.5),)),))
        second = AdmissibleCurve(star, GraphPoint(0, 0.25), (Segment(0.5, 0.5, (Leg(0, 0.25, 0.0),)),))
        glued = concatenate(first, 0.5, second)
        assert glued.horizon == pytest.approx(1.0)
        assert glued.evaluate(0.5) == GraphPoint(0, 0.25)
        assert glued.end == star.vertex_point("c")

    def test_concatenate_requires_matching_start(self, star):
        first = UnitEdgeCurveFactory(graph=star)
        with pytest.raises(InputError):
            concatenate(first, 0.5, ConstantCurveFactory(graph=star, start=GraphPoint(1, 0.5)))

    def test_at_constant_speed(self, star):
        curve = sample_curves(GraphPoint(0, 0.5), star, 2.0, 1.0, 3, seed=1)[2]
        length = curve.reparametrize().total_length
        rerun = at_constant_speed(curve, 2.0)
        assert rerun.speeds == [2.0]
        assert rerun.horizon == pytest.approx(length / 2.0)
        assert star.geodesic_distance(rerun.end, curve.end) <= 1e-9

    def test_at_constant_speed_of_resting_curve(self, star):
        assert at_constant_speed(ConstantCurveFactory(graph=star), 1.0).segments == ()

    def test_serialization_replays_curve(self, star):
        curve = sample_curves(GraphPoint(2, 0.6), star, 1.0, 2.0, 4, seed=17)[3]
        replay = loads(dumps(curve), star)
        assert dumps(replay) == dumps(curve)
        assert replay.evaluate(0.7) == curve.evaluate(0.7)

    def test_malformed_serialization(self, star):
        with pytest.raises(InputError):
            loads("segment 1.0 0.0\n", star)
        with pytest.raises(InputError):
            loads("start 0 0.5\nsegment 1.0 1.0 0:0.5\n", star)
