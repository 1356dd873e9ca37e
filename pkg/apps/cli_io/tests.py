"""
Tests for scenario loading and the ``hj`` management command.
"""

import csv
from io import StringIO
from pathlib import Path

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.core.exceptions import ConfigurationError, ScenarioError
from apps.hamiltonian.hamiltonians import CompositeHamiltonian, TabulatedHamiltonian
from apps.hj_solver.initial import AffineDatum, ConstantDatum
from apps.verification.checks import check_apriori_bounds
from apps.verification.suite import SuiteContext, run_suite, tolerances

from .parser import parse_scenario
from .runner import COMMANDS, run, transform_rows
from .scenario import flatten_errors, load_scenario

SCENARIOS = Path(__file__).resolve().parent / "scenarios"
SHIPPED = sorted(path.stem for path in SCENARIOS.glob("*.scn"))

MINIMAL = """\
[graph]
vertex a b
edge a b 1.0

[hamiltonian]
form = composite
h = linear

[initial]
kind = constant
value = 1.5

[solver]
T = 0.5
dt = {dt}
dx = 0.1
"""


def write_scenario(directory, text, name="scenario.scn"):
    path = directory / name
    path.write_text(text)
    return path


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def hj(*args, **options):
    stdout = StringIO()
    call_command("hj", *[str(arg) for arg in args], stdout=stdout, **options)
    return stdout.getvalue()


@pytest.mark.unit
class TestParser:
    def test_sections_and_rows(self):
        sections = parse_scenario(MINIMAL.format(dt=0.1) + "[probes]\nprobe 0 0.5 0.2  # mid\n")
        assert sections["graph"] == {"vertex": [["a", "b"]], "edge": [["a", "b", "1.0"]]}
        assert sections["solver"] == {"T": "0.5", "dt": "0.1", "dx": "0.1"}
        assert sections["probes"] == {"probe": [["0", "0.5", "0.2"]]}

    def test_unknown_section(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario("# header\n[solver]\nT = 1\n  [mesh]\n")
        assert excinfo.value.line == 4
        assert excinfo.value.column == 4
        assert excinfo.value.key == "mesh"

    def test_edge_arity(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario("[graph]\nvertex a b\nedge a b\n")
        assert (excinfo.value.line, excinfo.value.column) == (3, 1)

    def test_missing_equals(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario("[solver]\n  dt 0.1\n")
        assert (excinfo.value.line, excinfo.value.column) == (2, 3)

    def test_duplicate_key(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario("[solver]\ndt = 0.1\ndt = 0.2\n")
        assert excinfo.value.key == "solver.dt"
        assert excinfo.value.line == 3

    def test_content_before_first_section(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario("dt = 0.1\n")
        assert excinfo.value.line == 1


@pytest.mark.unit
class TestLoadScenario:
    def test_minimal_scenario(self, tmp_path):
        scenario = load_scenario(write_scenario(tmp_path, MINIMAL.format(dt=0.1)))
        assert set(scenario.graph.vertices) == {"a", "b"}
        assert scenario.lattice.size == 11
        assert isinstance(scenario.hamiltonian, CompositeHamiltonian)
        assert isinstance(scenario.u0, ConstantDatum)
        assert (scenario.T, scenario.dt, scenario.dx) == (0.5, 0.1, 0.1)
        assert scenario.speeds == "geometric"
        assert scenario.verification.curves == 200
        assert scenario.output_dir == tmp_path / "out"

    def test_zero_time_step_names_the_key(self, tmp_path):
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, MINIMAL.format(dt=0)))
        assert excinfo.value.key == "solver.dt"
        assert "Must be positive" in str(excinfo.value)

    def test_unknown_key_is_rejected(self, tmp_path):
        text = MINIMAL.format(dt=0.1).replace("h = linear", "h = linear\nfoo = 1")
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, text))
        assert excinfo.value.key == "hamiltonian.foo"
        assert "Unknown key" in str(excinfo.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "absent.scn")

    def test_unknown_edge_vertex(self, tmp_path):
        text = MINIMAL.format(dt=0.1).replace("edge a b 1.0", "edge a c 1.0")
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, text))
        assert excinfo.value.key == "graph.edges.0.v"

    def test_power_profile_needs_exponent(self, tmp_path):
        text = MINIMAL.format(dt=0.1).replace("h = linear", "h = power")
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, text))
        assert excinfo.value.key == "hamiltonian.a"

    def test_speed_list_must_contain_zero(self, tmp_path):
        text = MINIMAL.format(dt=0.1) + "v_grid = 0.5,1.0\n"
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, text))
        assert excinfo.value.key == "solver.v_grid"

    def test_explicit_speed_list(self, tmp_path):
        text = MINIMAL.format(dt=0.1) + "v_grid = 0,0.5,1.0\n"
        scenario = load_scenario(write_scenario(tmp_path, text))
        assert scenario.speeds == [0.0, 0.5, 1.0]

    def test_table_must_cover_every_node(self, tmp_path):
        (tmp_path / "f.csv").write_text("node_id,value\n0,1.0\n1,1.0\n")
        text = MINIMAL.format(dt=0.1).replace("h = linear", "h = linear\nf = f.csv")
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(write_scenario(tmp_path, text))
        assert excinfo.value.key == "hamiltonian.f"

    def test_overrides(self, tmp_path):
        scenario = load_scenario(
            write_scenario(tmp_path, MINIMAL.format(dt=0.1)),
            {"output_dir": tmp_path / "elsewhere", "seed": 9, "orientation": "max", "corrupt": True},
        )
        assert scenario.output_dir == tmp_path / "elsewhere"
        assert scenario.verification.seed == 9
        assert scenario.verification.corrupt
        assert scenario.maximize
        assert isinstance(scenario.internal_u0(), AffineDatum)

    def test_max_orientation_needs_composite_form(self):
        with pytest.raises(ConfigurationError):
            load_scenario(SCENARIOS / "tabulated_quadratic.scn", {"orientation": "max"})

    def test_flatten_errors(self):
        detail = {"solver": {"dt": ["Must be positive."]}, "probes": [{}, {"t": ["Bad."]}]}
        assert flatten_errors(detail) == [
            ("solver.dt", "Must be positive."),
            ("probes.1.t", "Bad."),
        ]

    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_scenarios_load(self, name):
        scenario = load_scenario(SCENARIOS / f"{name}.scn")
        assert scenario.name == name
        assert scenario.lattice.size > 1

    def test_tabulated_scenario(self):
        scenario = load_scenario(SCENARIOS / "tabulated_quadratic.scn")
        assert isinstance(scenario.hamiltonian, TabulatedHamiltonian)
        assert scenario.hamiltonian.is_homogeneous
        point = scenario.lattice.points[3]
        assert scenario.hamiltonian.value(point, 2.0) == pytest.approx(2.0)

    def test_variable_source_table(self):
        scenario = load_scenario(SCENARIOS / "eikonal_source.scn")
        f = scenario.hamiltonian.f.on_lattice(scenario.lattice)
        assert f[0] == pytest.approx(0.2)
        assert f[-1] == pytest.approx(0.5)
        assert np.all(np.diff(f) > 0)


@pytest.mark.unit
class TestWorkflows:
    def test_transform_reproduces_half_v_squared(self, tmp_path):
        hj("transform", SCENARIOS / "hopf_lax_path.scn", out=tmp_path)
        rows = read_csv(tmp_path / "transform.csv")
        assert list(rows[0]) == ["node_id", "v", "L", "roundtrip_error"]
        assert len(rows) == 201 * 51
        for row in rows:
            v = float(row["v"])
            assert abs(float(row["L"]) - 0.5 * v * v) <= 1e-9
            assert float(row["roundtrip_error"]) <= 1e-9

    def test_transform_writes_inf_literal(self, tmp_path):
        scenario = load_scenario(SCENARIOS / "constant.scn", {"output_dir": tmp_path})
        rows = transform_rows(scenario)
        assert len(rows) == scenario.lattice.size * (scenario.n_v + 1)
        run("transform", scenario)
        written = read_csv(tmp_path / "transform.csv")
        beyond = [row for row in written if float(row["v"]) > 1.0]
        inside = [row for row in written if float(row["v"]) <= 1.0]
        assert beyond and all(row["L"] == "inf" for row in beyond)
        assert all(float(row["L"]) == 0.0 for row in inside)

    def test_transform_of_tabulated_hamiltonian(self, tmp_path):
        hj("transform", SCENARIOS / "tabulated_quadratic.scn", out=tmp_path)
        rows = read_csv(tmp_path / "transform.csv")
        assert len(rows) == 11 * 41
        at_rest = [row for row in rows if float(row["v"]) == 0.0]
        assert all(float(row["L"]) == 0.0 for row in at_rest)

    def test_solve_writes_values_and_trajectories(self, tmp_path):
        output = hj("solve", SCENARIOS / "eikonal_star.scn", out=tmp_path)
        assert "solve finished" in output
        values = read_csv(tmp_path / "values.csv")
        assert list(values[0]) == ["node_id", "edge_id", "offset", "t", "U"]
        assert len(values) == 151 * 51
        assert values[0]["t"] == "0.0"
        trajectories = read_csv(tmp_path / "trajectories.csv")
        assert list(trajectories[0]) == ["probe", "h", "edge_id", "offset", "speed"]
        assert {row["probe"] for row in trajectories} == {"0", "1"}

    def test_outputs_are_deterministic(self, tmp_path):
        for run_dir in ("first", "second"):
            hj("solve", SCENARIOS / "eikonal_source.scn", out=tmp_path / run_dir)
        first = (tmp_path / "first" / "values.csv").read_bytes()
        assert first == (tmp_path / "second" / "values.csv").read_bytes()

    def test_max_orientation_negates_values(self, tmp_path):
        scenario = SCENARIOS / "quadratic_edge.scn"
        hj("solve", scenario, out=tmp_path / "min")
        hj("solve", scenario, out=tmp_path / "max", orientation="max")
        low = read_csv(tmp_path / "min" / "values.csv")
        high = read_csv(tmp_path / "max" / "values.csv")
        initial = [row for row in low if row["t"] == "0.0"]
        assert initial == [row for row in high if row["t"] == "0.0"]
        last = low[-1]["t"]
        final_low = np.array([float(row["U"]) for row in low if row["t"] == last])
        final_high = np.array([float(row["U"]) for row in high if row["t"] == last])
        assert np.all(final_high >= final_low)
        assert np.any(final_high > final_low)

    def test_converge_on_constant_scenario(self, tmp_path):
        hj("converge", SCENARIOS / "constant.scn", out=tmp_path)
        rows = read_csv(tmp_path / "convergence.csv")
        assert [row["level"] for row in rows] == ["0", "1", "2"]
        assert all(float(row["max_error"]) == 0.0 for row in rows)
        assert all(row["observed_order"] == "" for row in rows)

    def test_unknown_workflow(self):
        assert COMMANDS == ("solve", "verify", "transform", "converge")
        with pytest.raises(CommandError):
            hj("plot", SCENARIOS / "constant.scn")


@pytest.mark.integration
class TestExitCodes:
    def test_verify_constant_passes(self, tmp_path):
        output = hj("verify", SCENARIOS / "constant.scn", out=tmp_path)
        assert "verify finished" in output
        rows = read_csv(tmp_path / "report.csv")
        assert list(rows[0]) == ["check", "samples", "worst_violation", "tolerance", "pass"]
        assert all(row["pass"] == "true" for row in rows)
        assert not list(tmp_path.glob("counterexample_*.txt"))
        assert (tmp_path / "report.txt").read_text().startswith("check=initial_condition")

    def test_corrupted_grid_fails_with_counterexample(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            hj("verify", SCENARIOS / "constant.scn", out=tmp_path, corrupt=True)
        assert excinfo.value.returncode == 1
        counterexample = tmp_path / "counterexample_superoptimality.txt"
        assert counterexample.is_file()
        text = counterexample.read_text()
        assert text.startswith("start ")
        assert "\nprobe " in text
        rows = {row["check"]: row for row in read_csv(tmp_path / "report.csv")}
        assert rows["superoptimality"]["pass"] == "false"

    def test_configuration_error_exits_with_two(self, tmp_path):
        path = write_scenario(tmp_path, MINIMAL.format(dt=0))
        with pytest.raises(CommandError) as excinfo:
            hj("solve", path, out=tmp_path)
        assert excinfo.value.returncode == 2
        assert "solver.dt" in str(excinfo.value)

    def test_missing_scenario_exits_with_two(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            hj("verify", tmp_path / "absent.scn")
        assert excinfo.value.returncode == 2

    def test_verify_is_deterministic_for_a_seed(self, tmp_path):
        hj("verify", SCENARIOS / "constant.scn", out=tmp_path / "a", seed=5)
        hj("verify", SCENARIOS / "constant.scn", out=tmp_path / "b", seed=5)
        first = (tmp_path / "a" / "report.csv").read_bytes()
        assert first == (tmp_path / "b" / "report.csv").read_bytes()
        assert (tmp_path / "a" / "values.csv").read_bytes() == (
            tmp_path / "b" / "values.csv"
        ).read_bytes()


@pytest.mark.slow
@pytest.mark.integration
class TestShippedScenarios:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_apriori_bounds_hold(self, name):
        scenario = load_scenario(SCENARIOS / f"{name}.scn")
        problem = scenario.problem()
        grid = problem.solve()
        tol = tolerances(problem, grid)
        record = check_apriori_bounds(grid, problem.lagrangian, problem.u0, tol.bounds)
        assert record.passed
        assert record.samples == grid.values.size

    @pytest.mark.parametrize("name", SHIPPED)
    def test_suite_passes(self, name):
        scenario = load_scenario(SCENARIOS / f"{name}.scn")
        problem = scenario.problem()
        context = SuiteContext(problem, problem.solve(), scenario.verification, scenario.probes)
        report = run_suite(context)
        assert report.passed, report.as_text()
        assert report["superoptimality"].worst_violation < np.inf

    def test_eikonal_star_verifies(self, tmp_path):
        scenario = load_scenario(SCENARIOS / "eikonal_star.scn", {"output_dir": tmp_path})
        assert run("verify", scenario) == 0
        assert not list(tmp_path.glob("counterexample_*.txt"))

    def test_suite_on_hopf_lax_path(self):
        scenario = load_scenario(SCENARIOS / "hopf_lax_path.scn")
        problem = scenario.problem()
        report = run_suite(
            SuiteContext(problem, problem.solve(), scenario.verification, scenario.probes)
        )
        assert report["suboptimality"].passed
        assert report["superoptimality"].passed
        assert report["apriori_bounds"].passed
