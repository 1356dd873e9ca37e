"""
Tests for the hj_solver app.
"""

import logging

import numpy as np
import pytest

from apps.core.exceptions import ConfigurationError, InputError, InstanceTooLargeError, InternalError
from apps.curves.curves import action
from apps.hamiltonian.factories import EikonalHamiltonianFactory, QuadraticHamiltonianFactory
from apps.hamiltonian.fields import NodeField
from apps.metric_graph.factories import MetricGraphFactory, PathGraphFactory, StarGraphFactory
from apps.metric_graph.graph import GraphPoint
from apps.metric_graph.lattice import build_lattice

from .factories import (
    BumpFactory,
    ConstantDatumFactory,
    DistanceToVertexFactory,
    EikonalStarGridFactory,
    HopfLaxGridFactory,
    SolvedGridFactory,
)
from .grid import ValueGrid
from .initial import AffineDatum, ConstantDatum, DistanceToVertex, TableDatum, raised
from .oracles import (
    apriori_bounds,
    ball_minimum_oracle,
    brute_force_value,
    global_bounds,
    hopf_lax_oracle,
)
from .refinement import refine_study
from .scheme import solve, step
from .stencil import blend, speed_grid, speed_refinement
from .trajectory import extract_trajectory


def oracle_error(grid, u0, lagrangian=None, t=None):
    """Max node error against the Hopf-Lax oracle, or the ball minimum without a Lagrangian."""
    t = grid.horizon if t is None else t
    samples = build_lattice(grid.graph, grid.lattice.dx / 4).points
    if lagrangian is None:
        exact = ball_minimum_oracle(grid.graph, u0, grid.lattice.points, t, samples)
    else:
        exact = hopf_lax_oracle(grid.graph, lagrangian, u0, grid.lattice.points, t, samples)
    return float(np.max(np.abs(grid.layer(t) - exact)))


@pytest.fixture(scope="module")
def hopf_lax_grid():
    return HopfLaxGridFactory()


@pytest.mark.unit
class TestInitialData:
    def test_constant(self):
        lattice = build_lattice(PathGraphFactory(), 0.25)
        datum = ConstantDatumFactory()
        assert datum.at(GraphPoint(1, 0.3)) == 1.5
        assert np.all(datum.on_lattice(lattice) == 1.5)
        assert datum.modulus(lattice, [1.0, 0.25]) == [0.0, 0.0]

    def test_distance_to_vertex(self):
        datum = DistanceToVertexFactory()
        assert datum.at(GraphPoint(1, 0.5)) == pytest.approx(1.5)
        lattice = build_lattice(datum.graph, 0.25)
        expected = [datum.at(point) for point in lattice.points]
        assert np.allclose(datum.on_lattice(lattice), expected, atol=1e-12)
        assert datum.lipschitz_estimate(lattice) == pytest.approx(1.0)

    def test_bump(self):
        datum = BumpFactory()
        assert datum.at(datum.graph.vertex_point(0)) == 1.0
        assert datum.at(GraphPoint(0, 0.25)) == pytest.approx(0.5)
        assert datum.at(GraphPoint(1, 0.5)) == 0.0

    def test_bump_radius_must_be_positive(self):
        with pytest.raises(InputError):
            BumpFactory(radius=0.0)

    def test_table_interpolates_along_edges(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        datum = TableDatum(lattice, [0.0, 1.0, 3.0])
        assert datum.at(GraphPoint(0, 0.75)) == pytest.approx(2.0)
        assert not datum.closed_form

    def test_table_shape_is_checked(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        with pytest.raises(InputError):
            TableDatum(lattice, [0.0, 1.0])

    def test_affine_negation(self):
        datum = AffineDatum(DistanceToVertexFactory(), scale=-1.0)
        assert datum.at(GraphPoint(0, 0.5)) == pytest.approx(-0.5)

    def test_modulus_shrinks_with_delta(self):
        datum = DistanceToVertexFactory()
        lattice = build_lattice(datum.graph, 0.1)
        ladder = datum.modulus(lattice, [1.0, 0.5, 0.2, 0.1])
        assert ladder == sorted(ladder, reverse=True)
        assert ladder[-1] == pytest.approx(0.1)


@pytest.mark.unit
class TestSpeedGrid:
    def test_geometric_eikonal(self):
        lattice = build_lattice(PathGraphFactory(), 0.05)
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        speeds = speed_grid(lagrangian, lattice, 0.05, n_speeds=16)
        assert speeds[0] == 0.0
        assert speeds[-1] == 1.0
        assert len(speeds) == 16
        assert np.all(np.diff(speeds) > 0)

    def test_quadratic_cap_is_the_stencil_reach(self):
        lattice = build_lattice(PathGraphFactory(), 0.02)
        speeds = speed_grid(QuadraticHamiltonianFactory().lagrangian(), lattice, 0.01, n_speeds=8)
        assert speeds[-1] == pytest.approx(8.0)

    def test_uniform(self):
        lattice = build_lattice(PathGraphFactory(), 0.1)
        speeds = speed_grid(EikonalHamiltonianFactory().lagrangian(), lattice, 0.1, "uniform", 5)
        assert np.allclose(speeds, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_explicit_list_needs_zero(self):
        lattice = build_lattice(PathGraphFactory(), 0.1)
        with pytest.raises(ConfigurationError):
            speed_grid(EikonalHamiltonianFactory().lagrangian(), lattice, 0.1, [0.5, 1.0])

    def test_explicit_list_drops_fast_speeds(self, caplog):
        lattice = build_lattice(PathGraphFactory(), 0.1)
        with caplog.at_level(logging.WARNING):
            speeds = speed_grid(EikonalHamiltonianFactory().lagrangian(), lattice, 0.1, [0, 0.5, 3.0])
        assert list(speeds) == [0.0, 0.5]
        assert "Dropping speeds" in caplog.text

    def test_unknown_policy(self):
        lattice = build_lattice(PathGraphFactory(), 0.1)
        with pytest.raises(InputError):
            speed_grid(EikonalHamiltonianFactory().lagrangian(), lattice, 0.1, "random")

    def test_default_grid_refines_with_the_lattice(self):
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        coarse = build_lattice(PathGraphFactory(), 0.02)
        fine = build_lattice(PathGraphFactory(), 0.005)
        assert speed_refinement(coarse) == 1.0
        assert speed_refinement(fine) == 4.0
        few = speed_grid(lagrangian, coarse, 0.01)
        many = speed_grid(lagrangian, fine, 0.0025)
        assert len(few) == 64
        assert few[-1] == many[-1] == pytest.approx(8.0)
        assert many[1] == pytest.approx(few[1] / 4)
        assert np.max(many[2:] / many[1:-1]) <= (np.max(few[2:] / few[1:-1]) - 1.0) / 4 + 1.0

    def test_explicit_count_is_not_refined(self):
        lattice = build_lattice(PathGraphFactory(), 0.005)
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        assert len(speed_grid(lagrangian, lattice, 0.005, n_speeds=16)) == 16
        assert len(speed_grid(lagrangian, lattice, 0.005, "uniform")) == 253


@pytest.mark.unit
class TestBlend:
    def test_exact_when_ends_agree(self):
        weights = np.random.default_rng(0).uniform(0.0, 1.0, 1000)
        assert np.all(blend(1.5, 1.5, weights) == 1.5)

    def test_endpoints(self):
        assert blend(0.1, 0.7, 0.0) == 0.1
        assert blend(0.1, 0.7, 1.0) == 0.7

    def test_monotone_under_rounding(self):
        rng = np.random.default_rng(11)
        lower = rng.uniform(-4.0, 4.0, 200_000)
        upper = rng.uniform(-4.0, 4.0, 200_000)
        weight = rng.uniform(0.0, 1.0, 200_000)
        base = blend(lower, upper, weight)
        assert np.all(blend(np.nextafter(lower, np.inf), upper, weight) >= base)
        assert np.all(blend(lower, np.nextafter(upper, np.inf), weight) >= base)
        assert np.all(base >= np.minimum(lower, upper))
        assert np.all(base <= np.maximum(lower, upper))


@pytest.mark.unit
class TestSolve:
    @pytest.mark.parametrize(
        "grid_factory, edges, dt",
        [(SolvedGridFactory, 2, 0.05), (HopfLaxGridFactory, 3, 0.01), (EikonalStarGridFactory, 3, 0.02)],
    )
    def test_grid_factories_build_independently(self, grid_factory, edges, dt):
        grid = grid_factory(T=0.1)
        assert len(grid.graph.edges) == edges
        assert grid.dt == dt
        assert grid.n_steps == round(0.1 / dt)

    def test_constant_datum_stays_constant(self):
        grid = SolvedGridFactory(u0=ConstantDatum(1.5))
        assert np.all(grid.values[:, 0] == 1.5)
        assert np.allclose(grid.values, 1.5, atol=1e-12)

    def test_initial_layer_is_exact(self):
        grid = SolvedGridFactory()
        expected = DistanceToVertex(grid.graph, 0).on_lattice(grid.lattice)
        assert np.array_equal(grid.values[:, 0], expected)

    def test_eikonal_ball_minimum_on_path(self):
        graph = PathGraphFactory()
        u0 = BumpFactory(graph=graph, vertex=1, radius=0.5, height=-1.0)
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        grid = SolvedGridFactory(graph=graph, u0=u0, T=0.5, dt=0.05)
        assert oracle_error(grid, u0) <= 2 * (0.05 + 0.05)
        assert grid.value_at(GraphPoint(0, 0.5), 0.5) == pytest.approx(-1.0, abs=1e-9)

    def test_horizon_is_rounded_up(self, caplog):
        with caplog.at_level(logging.WARNING):
            grid = SolvedGridFactory(T=0.33, dt=0.1)
        assert grid.n_steps == 4
        assert grid.horizon == pytest.approx(0.4)
        assert "not a multiple" in caplog.text

    def test_invalid_time_step(self):
        with pytest.raises(InputError):
            SolvedGridFactory(dt=0.0)

    def test_lattice_of_another_graph(self):
        graph = PathGraphFactory()
        with pytest.raises(InputError):
            SolvedGridFactory(graph=graph, lattice=build_lattice(PathGraphFactory(), 0.1))

    def test_speed_list_without_rest(self):
        with pytest.raises(ConfigurationError):
            SolvedGridFactory(speeds=[0.5, 1.0])

    def test_apriori_bounds(self):
        graph = StarGraphFactory()
        lattice = build_lattice(graph, 0.05)
        f = NodeField.tabulated(lattice, 0.3 * np.cos(np.arange(lattice.size)))
        hamiltonian = QuadraticHamiltonianFactory(f=f)
        lagrangian = hamiltonian.lagrangian()
        u0 = BumpFactory(graph=graph, vertex="c", radius=0.8)
        grid = solve(graph, lattice, lagrangian, u0, 0.5, 0.05)
        lower, upper = apriori_bounds(grid, lagrangian, u0)
        rest = np.abs(lagrangian.node_values(lattice, [0.0])).max()
        c_h0 = np.abs(hamiltonian.node_values(lattice, [0.0])).max()
        lipschitz = u0.lipschitz_estimate(lattice)
        tol = 1e-9 + 2 * (0.05 + 0.05) * (1 + c_h0 + rest + lipschitz)
        assert np.all(grid.values >= lower - tol)
        assert np.all(grid.values <= upper + tol)
        low, high = global_bounds(grid, lagrangian, u0)
        assert low - tol <= grid.values.min() and grid.values.max() <= high + tol

    def test_monotone_update_is_exact(self):
        graph = PathGraphFactory()
        lattice = build_lattice(graph, 0.05)
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, 0)
        increments = np.random.default_rng(3).uniform(0.0, 0.3, lattice.size)
        low = solve(graph, lattice, lagrangian, u0, 0.5, 0.05)
        high = solve(graph, lattice, lagrangian, raised(u0, lattice, increments), 0.5, 0.05)
        assert np.all(high.values >= low.values)

    def test_step_reproduces_every_layer(self):
        grid = SolvedGridFactory(u0=BumpFactory(vertex=1))
        for k in range(grid.n_steps):
            assert np.array_equal(step(grid, k), grid.values[:, k + 1])

    def test_step_needs_solver_grid(self):
        grid = SolvedGridFactory()
        bare = ValueGrid(grid.lattice, grid.dt, grid.horizon, grid.values)
        with pytest.raises(InputError):
            step(bare, 0)

    def test_semigroup_against_doubled_step(self):
        fine = SolvedGridFactory(dt=0.05)
        coarse = SolvedGridFactory(dt=0.1)
        assert np.allclose(fine.values[:, ::2], coarse.values, atol=0.05)

    def test_value_at_interpolates_in_time(self):
        grid = SolvedGridFactory()
        point = grid.lattice.points[5]
        halfway = 0.5 * (grid.values[5, 1] + grid.values[5, 2])
        assert grid.value_at(point, 0.075) == pytest.approx(halfway)
        with pytest.raises(InputError):
            grid.value_at(point, 1.0)


@pytest.mark.integration
class TestAcceptance:
    def test_hopf_lax_agreement(self, hopf_lax_grid):
        grid = hopf_lax_grid
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(grid.graph, 0)
        assert oracle_error(grid, u0, lagrangian) <= 0.05
        assert grid.value_at(grid.graph.vertex_point(0), 1.0) == pytest.approx(0.0, abs=0.05)
        assert grid.value_at(grid.graph.vertex_point(1), 1.0) == pytest.approx(0.5, abs=0.05)

    def test_eikonal_ball_on_star(self):
        grid = EikonalStarGridFactory()
        u0 = DistanceToVertex(grid.graph, "l1")
        error = oracle_error(grid, u0)
        assert error <= 2 * (0.02 + 0.02)

    def test_brute_force_agreement(self):
        graph = PathGraphFactory()
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, 1)
        grid = SolvedGridFactory(graph=graph, lagrangian=lagrangian, u0=u0, dx=0.02, dt=0.02, T=0.5)
        rng = np.random.default_rng(7)
        probes = rng.choice(grid.lattice.size, size=10, replace=False)
        speeds = np.linspace(0.0, 1.0, 5)
        for node in probes:
            point = grid.lattice.points[node]
            reference = brute_force_value(graph, lagrangian, u0, point, 0.5, 3, speeds)
            assert abs(grid.values[node, -1] - reference) <= 2 * (0.02 + 0.02)


@pytest.mark.unit
class TestTrajectory:
    def test_constant_scenario_gives_constant_curve(self):
        grid = SolvedGridFactory(u0=ConstantDatum(1.5))
        point = grid.lattice.points[4]
        curve = extract_trajectory(grid, point, grid.horizon)
        assert curve.is_constant
        assert curve.evaluate(0.0) == point

    def test_anchored_at_start(self):
        grid = SolvedGridFactory()
        point = grid.lattice.points[-3]
        curve = extract_trajectory(grid, point, 0.3)
        assert curve.evaluate(0.0) == grid.graph.canonical(point)
        assert curve.horizon == pytest.approx(0.3)

    def test_hopf_lax_trajectory_heads_to_origin(self, hopf_lax_grid):
        grid = hopf_lax_grid
        start = grid.graph.vertex_point(1)
        curve = extract_trajectory(grid, start, 1.0)
        origin = grid.graph.vertex_point(0)
        assert grid.graph.geodesic_distance(curve.end, origin) <= 0.25
        assert 0.75 <= curve.reparametrize().total_length <= 1.25

    def test_trajectory_consistency(self, hopf_lax_grid):
        grid = hopf_lax_grid
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(grid.graph, 0)
        eps = 5 * (0.02 + 0.01) * (1 + 1)
        rng = np.random.default_rng(5)
        for _ in range(20):
            node = int(rng.integers(0, grid.lattice.size))
            k = int(rng.integers(1, grid.n_steps + 1))
            t = k * grid.dt
            curve = extract_trajectory(grid, grid.lattice.points[node], t)
            cost = action(curve, lagrangian, t) + u0.at(curve.evaluate(t))
            assert cost <= grid.values[node, k] + eps

    def test_off_grid_time_rejected(self):
        grid = SolvedGridFactory()
        with pytest.raises(InputError):
            extract_trajectory(grid, grid.lattice.points[0], 0.123)

    def test_missing_records(self):
        grid = SolvedGridFactory()
        bare = ValueGrid(grid.lattice, grid.dt, grid.horizon, grid.values)
        with pytest.raises(InternalError):
            extract_trajectory(bare, grid.lattice.points[0], grid.dt)


@pytest.mark.unit
class TestOracles:
    def test_brute_force_constant_curves_only(self):
        graph = PathGraphFactory()
        lagrangian = QuadraticHamiltonianFactory(f=NodeField.uniform(0.25)).lagrangian()
        u0 = DistanceToVertex(graph, 0)
        value = brute_force_value(graph, lagrangian, u0, GraphPoint(0, 0.3), 1.0, 2, [0.0])
        assert value == pytest.approx(1.0 * 0.25 + 0.3)

    def test_brute_force_reaches_the_cheap_end(self):
        graph = MetricGraphFactory()
        u0 = DistanceToVertex(graph, "a")
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        value = brute_force_value(graph, lagrangian, u0, graph.vertex_point("b"), 1.0, 3, [0.0, 0.5, 1.0])
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_brute_force_caps(self):
        graph = PathGraphFactory()
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, 0)
        with pytest.raises(InstanceTooLargeError):
            brute_force_value(graph, lagrangian, u0, GraphPoint(0, 0.5), 1.0, 5, [0.0, 1.0])
        with pytest.raises(InstanceTooLargeError):
            brute_force_value(graph, lagrangian, u0, GraphPoint(0, 0.5), 1.0, 2, np.linspace(0, 1, 7))
        star = StarGraphFactory(arms=(1.0,) * 5)
        with pytest.raises(InstanceTooLargeError):
            brute_force_value(star, lagrangian, DistanceToVertex(star, "c"), GraphPoint(0, 0.5), 1.0, 1, [0.0])

    def test_hopf_lax_at_time_zero(self):
        graph = PathGraphFactory()
        u0 = DistanceToVertex(graph, 0)
        points = build_lattice(graph, 0.5).points
        values = hopf_lax_oracle(graph, QuadraticHamiltonianFactory().lagrangian(), u0, points, 0.0, points)
        assert np.allclose(values, u0.at_many(points))

    def test_hopf_lax_needs_homogeneous_lagrangian(self):
        graph = PathGraphFactory()
        lattice = build_lattice(graph, 0.5)
        f = NodeField.tabulated(lattice, np.linspace(0.0, 1.0, lattice.size))
        lagrangian = QuadraticHamiltonianFactory(f=f).lagrangian()
        with pytest.raises(InputError):
            hopf_lax_oracle(graph, lagrangian, DistanceToVertex(graph, 0), lattice.points, 1.0, lattice.points)


@pytest.mark.unit
class TestRefinement:
    @staticmethod
    def builder(graph, lagrangian, u0, T):
        return lambda dx, dt: solve(graph, build_lattice(graph, dx), lagrangian, u0, T, dt)

    def test_constant_scenario_is_exact(self):
        graph = PathGraphFactory()
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        u0 = ConstantDatum(1.5)
        table = refine_study(
            self.builder(graph, lagrangian, u0, 1.0),
            0.1,
            0.1,
            3,
            oracle=lambda points, t: np.full(len(points), 1.5),
        )
        assert len(table.rows) == 3
        assert all(error <= 1e-12 for error in table.errors)
        assert table.overall_order is None

    def test_eikonal_ball_errors_do_not_grow(self):
        graph = StarGraphFactory()
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, "l1")
        samples = build_lattice(graph, 0.005).points
        table = refine_study(
            self.builder(graph, lagrangian, u0, 1.0),
            0.1,
            0.1,
            3,
            oracle=lambda points, t: ball_minimum_oracle(graph, u0, points, t, samples),
        )
        assert table.is_monotone(slack=1e-9)
        assert all(row.max_error <= 2 * (row.dx + row.dt) for row in table.rows)

    def test_reference_solve_without_oracle(self):
        graph = PathGraphFactory()
        lattice = build_lattice(graph, 0.1)
        f = NodeField.tabulated(lattice, np.linspace(0.0, 0.5, lattice.size))
        lagrangian = QuadraticHamiltonianFactory(f=f).lagrangian()
        table = refine_study(self.builder(graph, lagrangian, DistanceToVertex(graph, 2), 0.5), 0.2, 0.1, 2)
        assert [row.level for row in table.rows] == [0, 1]
        assert table.rows[0].observed_order is None
        assert all(np.isfinite(table.errors))

    def test_needs_two_levels(self):
        with pytest.raises(InputError):
            refine_study(lambda dx, dt: None, 0.1, 0.1, 1)

    @pytest.mark.slow
    def test_hopf_lax_convergence(self):
        graph = PathGraphFactory(lengths=(1.0, 1.5, 1.5))
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, 0)
        samples = build_lattice(graph, 0.002).points
        table = refine_study(
            self.builder(graph, lagrangian, u0, 1.0),
            0.02,
            0.01,
            3,
            oracle=lambda points, t: hopf_lax_oracle(graph, lagrangian, u0, points, t, samples),
        )
        assert table.errors[0] <= 0.05
        assert table.errors[0] > table.errors[1] > table.errors[2]
        assert table.overall_order >= 0.8

    @pytest.mark.slow
    def test_speed_policies_agree(self, hopf_lax_grid):
        graph = hopf_lax_grid.graph
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        u0 = DistanceToVertex(graph, 0)
        uniform = solve(graph, hopf_lax_grid.lattice, lagrangian, u0, 1.0, 0.01, policy="uniform")
        errors = [oracle_error(grid, u0, lagrangian) for grid in (hopf_lax_grid, uniform)]
        gap = np.max(np.abs(hopf_lax_grid.values[:, -1] - uniform.values[:, -1]))
        assert gap <= 2 * max(errors)
