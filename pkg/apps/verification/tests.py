"""
Tests for the verification app.
"""

import logging

import numpy as np
import pytest

from apps.core.exceptions import InputError, InternalError
from apps.curves.curves import AdmissibleCurve, Segment, action, shift
from apps.curves.paths import Leg
from apps.hamiltonian.factories import EikonalHamiltonianFactory
from apps.hj_solver.grid import ValueGrid
from apps.hj_solver.trajectory import extract_trajectory
from apps.metric_graph.factories import PathGraphFactory
from apps.metric_graph.graph import GraphPoint
from apps.metric_graph.lattice import build_lattice

from .checks import (
    CurveSampler,
    check_comparison,
    check_dpp_determinism,
    check_dpp_semigroup,
    check_initial_condition,
    check_metric_viscosity,
    check_monotone_update,
    check_suboptimality,
    check_superoptimality,
)
from .factories import (
    ConstantProblemFactory,
    EikonalStarProblemFactory,
    HopfLaxProblemFactory,
    SuiteContextFactory,
)
from .modulus import estimate_modulus
from .report import CheckRecord, Counterexample, VerificationReport, merge_records
from .suite import (
    VerificationParams,
    corrupt_grid,
    run_suite,
    stability_constant,
    tolerances,
)


@pytest.fixture(scope="module")
def star_problem():
    return EikonalStarProblemFactory()


@pytest.fixture(scope="module")
def star_grid(star_problem):
    return star_problem.solve()


@pytest.fixture(scope="module")
def constant_problem():
    return ConstantProblemFactory()


@pytest.fixture(scope="module")
def constant_grid(constant_problem):
    return constant_problem.solve()


def frozen_grid(lattice, initial, dt, n_steps):
    """A grid that repeats ``initial`` at every time step."""
    values = np.repeat(np.asarray(initial, dtype=float)[:, None], n_steps + 1, axis=1)
    return ValueGrid(lattice, dt, n_steps * dt, values)


@pytest.mark.unit
class TestReport:
    def test_pass_iff_within_tolerance(self):
        assert CheckRecord("a", 3, 0.1, 0.1).passed
        assert CheckRecord("a", 3, -np.inf, 0.0).passed

    def test_failing_record_needs_counterexample(self):
        with pytest.raises(InternalError):
            CheckRecord("a", 3, 0.2, 0.1)

    def test_passing_record_drops_counterexample(self):
        graph = PathGraphFactory()
        point = GraphPoint(0, 0.5)
        example = Counterexample(AdmissibleCurve.constant(graph, point), point, 1.0, 0.0)
        record = CheckRecord("a", 3, 0.0, 0.1, example)
        assert record.counterexample is None

    def test_text_and_row(self):
        record = CheckRecord("suboptimality", 4000, -0.25, 0.5)
        assert record.as_row() == ("suboptimality", "4000", "-0.25", "0.5", "true")
        assert record.as_text() == (
            "check=suboptimality samples=4000 worst_violation=-0.25 tolerance=0.5 pass=true"
        )

    def test_merge_keeps_worst(self):
        graph = PathGraphFactory()
        point = GraphPoint(0, 0.5)
        example = Counterexample(AdmissibleCurve.constant(graph, point), point, 1.0, 0.5)
        merged = merge_records(
            "superoptimality",
            [CheckRecord("x", 2, 0.1, 1.0), CheckRecord("x", 3, 2.0, 1.0, example)],
            1.0,
        )
        assert merged.samples == 5
        assert merged.worst_violation == 2.0
        assert merged.counterexample is example
        assert not merged.passed

    def test_merge_of_nothing_passes(self):
        record = merge_records("superoptimality", [], 1.0)
        assert record.samples == 0
        assert record.passed

    def test_report_logs_failures(self, caplog):
        graph = PathGraphFactory()
        point = GraphPoint(0, 0.5)
        example = Counterexample(AdmissibleCurve.constant(graph, point), point, 1.0, 0.0)
        report = VerificationReport()
        with caplog.at_level(logging.INFO, logger="apps.verification.report"):
            report.add(CheckRecord("good", 1, 0.0, 0.0))
            report.add(CheckRecord("bad", 1, 1.0, 0.0, example))
        assert not report.passed
        assert [record.check for record in report.failures] == ["bad"]
        assert report["good"].passed
        assert any(r.levelno == logging.WARNING and "bad" in r.getMessage() for r in caplog.records)
        assert report.as_text().count("\n") == 2

    def test_counterexample_replays(self):
        graph = PathGraphFactory()
        curve = AdmissibleCurve(
            graph,
            GraphPoint(0, 0.25),
            [Segment(0.5, 1.0, (Leg(0, 0.25, 0.75),)), Segment(0.5, 0.0, ())],
        )
        example = Counterexample(curve, GraphPoint(0, 0.25), 1.0, 0.5)
        replayed = Counterexample.parse(example.as_text(), graph)
        assert replayed.x == example.x
        assert (replayed.t, replayed.h) == (1.0, 0.5)
        assert replayed.curve.evaluate(0.5) == curve.evaluate(0.5)

    def test_counterexample_without_probe(self):
        with pytest.raises(InputError):
            Counterexample.parse("start 0 0.5\n", PathGraphFactory())


@pytest.mark.unit
class TestInequalityChecks:
    def test_initial_condition_is_exact(self, star_problem, star_grid):
        record = check_initial_condition(star_grid, star_problem.u0)
        assert record.passed
        assert record.worst_violation == 0.0

    def test_suboptimality_constant(self, constant_problem, constant_grid):
        sampler = CurveSampler(curves=20, triples=5, seed=3)
        record = check_suboptimality(constant_grid, constant_problem.lagrangian, sampler, 1e-9)
        assert record.passed
        assert record.samples == 100

    def test_suboptimality_eikonal(self, star_problem, star_grid):
        tol = tolerances(star_problem, star_grid).suboptimality
        sampler = CurveSampler(curves=50, triples=8, seed=0)
        record = check_suboptimality(star_grid, star_problem.lagrangian, sampler, tol)
        assert record.passed
        assert record.worst_violation <= 1e-9

    def test_suboptimality_is_seeded(self, star_problem, star_grid):
        sampler = CurveSampler(curves=10, triples=4, seed=11)
        first = check_suboptimality(star_grid, star_problem.lagrangian, sampler, 1.0)
        second = check_suboptimality(star_grid, star_problem.lagrangian, sampler, 1.0)
        assert first.worst_violation == second.worst_violation

    def test_superoptimality_constant_witness(self, constant_problem, constant_grid):
        x = constant_grid.lattice.points[3]
        witness = AdmissibleCurve.constant(constant_grid.graph, x)
        record = check_superoptimality(constant_grid, constant_problem.lagrangian, witness, x, 0.5, 0.0)
        assert record.passed
        assert record.worst_violation == pytest.approx(0.0, abs=1e-12)

    def test_superoptimality_needs_anchored_witness(self, constant_problem, constant_grid):
        witness = AdmissibleCurve.constant(constant_grid.graph, GraphPoint(0, 0.5))
        with pytest.raises(InputError):
            check_superoptimality(
                constant_grid, constant_problem.lagrangian, witness, GraphPoint(1, 0.5), 0.5, 0.1
            )

    def test_superoptimality_needs_grid_time(self, constant_problem, constant_grid):
        x = GraphPoint(0, 0.5)
        witness = AdmissibleCurve.constant(constant_grid.graph, x)
        with pytest.raises(InputError):
            check_superoptimality(constant_grid, constant_problem.lagrangian, witness, x, 0.123, 0.1)

    def test_superoptimality_along_trajectories(self, star_problem, star_grid):
        eps = tolerances(star_problem, star_grid).superoptimality
        for node in (5, 17, 40):
            x = star_grid.lattice.points[node]
            witness = extract_trajectory(star_grid, x, 0.5)
            record = check_superoptimality(star_grid, star_problem.lagrangian, witness, x, 0.5, eps)
            assert record.passed
            assert record.samples == 10

    def test_shifted_witnesses_keep_a_finite_action(self, star_problem, star_grid):
        for node in (5, 17, 40):
            x = star_grid.lattice.points[node]
            witness = extract_trajectory(star_grid, x, 0.5)
            for k in range(1, star_grid.n_steps + 1):
                h = k * star_grid.dt
                tail = shift(witness, h)
                assert tail.max_speed <= 1.0
                assert np.isfinite(action(tail, star_problem.lagrangian, max(0.0, 0.5 - h)))

    def test_corrupted_entry_fails_superoptimality(self, star_problem, star_grid):
        amount = 10 * tolerances(star_problem, star_grid).suboptimality
        corrupted, (x, t) = corrupt_grid(star_grid, amount)
        witness = extract_trajectory(corrupted, x, t)
        eps = tolerances(star_problem, star_grid).superoptimality
        record = check_superoptimality(corrupted, star_problem.lagrangian, witness, x, t, eps)
        assert not record.passed
        replayed = Counterexample.parse(record.counterexample.as_text(), star_grid.graph)
        assert replayed.x == x
        assert replayed.t == pytest.approx(t)


@pytest.mark.unit
class TestMetricViscosity:
    def test_constant_function(self, constant_problem, constant_grid):
        sampler = CurveSampler(curves=40, triples=8, seed=1)
        record = check_metric_viscosity(constant_grid, constant_problem.hamiltonian, sampler, 1e-9)
        assert record.passed
        assert record.samples > 0

    def test_frozen_steep_datum_fails(self):
        graph = PathGraphFactory()
        lattice = build_lattice(graph, 0.05)
        initial = 2.0 * lattice.distances[lattice.vertex_nodes[0]]
        grid = frozen_grid(lattice, initial, 0.05, 20)
        sampler = CurveSampler(curves=200, triples=20, seed=0)
        record = check_metric_viscosity(grid, EikonalHamiltonianFactory(), sampler, 0.1)
        assert not record.passed
        assert 1.0 < record.worst_violation <= 2.0 + 1e-9
        assert record.counterexample.h == pytest.approx(4 * 0.05)

    def test_solver_output(self, star_problem, star_grid):
        tol = tolerances(star_problem, star_grid).viscosity
        sampler = CurveSampler(curves=100, triples=10, seed=2)
        record = check_metric_viscosity(star_grid, star_problem.hamiltonian, sampler, tol)
        assert record.passed

    def test_short_horizon_takes_no_samples(self, caplog):
        graph = PathGraphFactory()
        lattice = build_lattice(graph, 0.1)
        grid = frozen_grid(lattice, np.zeros(lattice.size), 0.1, 3)
        with caplog.at_level(logging.WARNING, logger="apps.verification.checks"):
            record = check_metric_viscosity(grid, EikonalHamiltonianFactory(), CurveSampler(), 0.0)
        assert record.samples == 0
        assert record.passed
        assert "too short" in caplog.text


@pytest.mark.unit
class TestComparison:
    def test_degenerate(self, star_grid):
        assert check_comparison(star_grid, star_grid, 1e-9).passed

    def test_constant_shift(self, star_grid):
        shifted = star_grid.with_values(star_grid.values + 1.0)
        record = check_comparison(star_grid, shifted, 0.0)
        assert record.passed
        assert record.worst_violation == pytest.approx(0.0, abs=1e-12)

    def test_reversed_order_fails(self, star_grid):
        lowered = star_grid.with_values(star_grid.values - np.linspace(0, 1, star_grid.n_steps + 1))
        record = check_comparison(star_grid, lowered, 0.1)
        assert not record.passed
        assert record.worst_violation == pytest.approx(1.0)
        assert record.counterexample.t == pytest.approx(star_grid.horizon)

    def test_mismatched_grids(self, star_problem, star_grid):
        other = star_problem.solve(dt=0.025)
        with pytest.raises(InputError):
            check_comparison(star_grid, other, 1e-9)

    def test_monotone_update(self, star_grid):
        raised = star_grid.with_values(star_grid.values + 0.25)
        assert check_monotone_update(star_grid, raised).passed
        record = check_monotone_update(raised, star_grid)
        assert not record.passed
        assert record.worst_violation == pytest.approx(0.25)

    def test_dpp_determinism(self, star_grid):
        record = check_dpp_determinism(star_grid)
        assert record.passed
        assert record.worst_violation == 0.0

    def test_dpp_determinism_catches_edits(self, star_grid):
        values = np.array(star_grid.values)
        values[10, 4] += 0.5
        record = check_dpp_determinism(star_grid.with_values(values))
        assert not record.passed
        assert record.counterexample is not None

    def test_dpp_semigroup(self, star_problem, star_grid):
        doubled = star_problem.solve(dt=0.1)
        tol = tolerances(star_problem, star_grid).semigroup
        record = check_dpp_semigroup(star_grid, doubled, tol)
        assert record.passed
        assert record.samples == star_grid.lattice.size * 6
        assert tol == pytest.approx(2.0 * (0.05 + 0.05) * 2.0)

    def test_dpp_semigroup_catches_edits(self, star_problem, star_grid):
        doubled = star_problem.solve(dt=0.1)
        values = np.array(star_grid.values)
        values[10, 4] += 1.0
        record = check_dpp_semigroup(star_grid.with_values(values), doubled, 0.4)
        assert not record.passed
        assert record.counterexample.x == star_grid.lattice.points[10]
        assert record.counterexample.t == pytest.approx(0.2)

    def test_dpp_semigroup_needs_a_doubled_step(self, star_grid):
        with pytest.raises(InputError):
            check_dpp_semigroup(star_grid, star_grid, 1.0)


@pytest.mark.unit
class TestModulus:
    def test_constant(self, constant_grid):
        table = estimate_modulus(constant_grid)
        assert np.all(table.omegas == 0.0)

    def test_lipschitz_eikonal(self, star_grid):
        table = estimate_modulus(star_grid, seed=4)
        assert np.all(np.diff(table.omegas) >= 0)
        assert np.all(table.omegas <= table.deltas * (1 + 1e-9))
        assert table.at(table.deltas[2]) == table.omegas[2]

    def test_delta_below_ladder(self, star_grid):
        table = estimate_modulus(star_grid, deltas=[0.5, 1.0])
        with pytest.raises(InputError):
            table.at(0.1)

    def test_bad_deltas(self, star_grid):
        with pytest.raises(InputError):
            estimate_modulus(star_grid, deltas=[0.0, 1.0])


@pytest.mark.integration
class TestSuite:
    def test_stability_constant(self, star_problem, constant_problem):
        assert stability_constant(star_problem) == pytest.approx(2.0)
        assert stability_constant(constant_problem) == pytest.approx(1.0)

    def test_eikonal_passes(self):
        report = run_suite(SuiteContextFactory())
        assert report.passed, report.as_text()
        assert [record.check for record in report] == [
            "initial_condition",
            "apriori_bounds",
            "global_bounds",
            "suboptimality",
            "superoptimality",
            "metric_viscosity",
            "comparison_degenerate",
            "comparison_ordered",
            "monotone_update",
            "dpp_determinism",
            "dpp_semigroup",
            "arcwise_continuity",
        ]

    def test_constant_passes(self):
        report = run_suite(SuiteContextFactory(problem=ConstantProblemFactory()))
        assert report.passed, report.as_text()

    def test_corruption_fails_with_counterexample(self):
        context = SuiteContextFactory()
        context.params = VerificationParams(curves=40, triples=10, probes=0, corrupt=True)
        report = run_suite(context)
        assert not report.passed
        assert not report["superoptimality"].passed
        assert all(record.counterexample is not None for record in report.failures)

    @pytest.mark.slow
    def test_hopf_lax_superoptimality(self):
        problem = HopfLaxProblemFactory()
        grid = problem.solve()
        eps = tolerances(problem, grid).superoptimality
        for node in (20, 60, 110):
            x = grid.lattice.points[node]
            witness = extract_trajectory(grid, x, 1.0)
            assert check_superoptimality(grid, problem.lagrangian, witness, x, 1.0, eps).passed
