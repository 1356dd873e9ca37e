"""
The four ``hj`` workflows on a loaded scenario.
"""

import logging

import numpy as np

from apps.hamiltonian.legendre import dual_roundtrip
from apps.hj_solver.oracles import hopf_lax_oracle
from apps.hj_solver.refinement import refine_study
from apps.hj_solver.trajectory import extract_trajectory
from apps.metric_graph.lattice import build_lattice
from apps.verification.suite import SuiteContext, run_suite, snap_probe

from .writers import (
    write_convergence,
    write_report,
    write_trajectories,
    write_transform,
    write_values,
)

logger = logging.getLogger(__name__)

COMMANDS = ("solve", "verify", "transform", "converge")

# The Hopf-Lax reference minimizes over a lattice this many times finer than
# the finest refinement level.
ORACLE_REFINEMENT = 4


def _sign(scenario):
    return -1.0 if scenario.maximize else 1.0


def run_solve(scenario):
    problem = scenario.problem()
    grid = problem.solve()
    out = scenario.output_dir
    write_values(out / "values.csv", grid, _sign(scenario))
    trajectories = []
    for point, t in scenario.probes:
        point, t = snap_probe(grid, point, t)
        trajectories.append((extract_trajectory(grid, point, t), t))
    write_trajectories(out / "trajectories.csv", trajectories, grid.dt)
    return 0


def run_verify(scenario):
    problem = scenario.problem()
    grid = problem.solve()
    out = scenario.output_dir
    write_values(out / "values.csv", grid, _sign(scenario))
    report = run_suite(SuiteContext(problem, grid, scenario.verification, scenario.probes))
    write_report(out, report)
    return 0 if report.passed else 1


def transform_rows(scenario):
    """``(node, v, L(x, v), |H**(x, v) - H(x, v)|)`` on the speed grid ``[0, v_max]``."""
    hamiltonian = scenario.hamiltonian
    lattice = scenario.lattice
    lagrangian = hamiltonian.lagrangian(p_max=scenario.p_max, n_p=scenario.n_p)
    v = np.linspace(0.0, scenario.v_max, scenario.n_v + 1)
    costs = lagrangian.node_values(lattice, v)

    cache = {}
    rows = []
    for node, point in enumerate(lattice.points):
        exact = np.atleast_1d(hamiltonian.value(point, v))
        for j, speed in enumerate(v):
            key = j if lagrangian.is_homogeneous else (node, j)
            if key not in cache:
                recovered = dual_roundtrip(lagrangian, point, speed, scenario.v_max, scenario.n_v)
                cache[key] = abs(recovered - float(exact[j]))
            rows.append((node, float(speed), float(costs[node, j]), cache[key]))
    return rows


def run_transform(scenario):
    write_transform(scenario.output_dir / "transform.csv", transform_rows(scenario))
    return 0


def convergence_table(scenario):
    graph = scenario.graph

    def build(dx, dt):
        return scenario.problem(build_lattice(graph, dx), dt).solve()

    problem = scenario.problem()
    oracle = None
    if problem.lagrangian.is_homogeneous:
        finest = scenario.dx / 2.0 ** (scenario.levels - 1)
        samples = build_lattice(graph, finest / ORACLE_REFINEMENT).points

        def oracle(points, t):
            return hopf_lax_oracle(graph, problem.lagrangian, problem.u0, points, t, samples)

        logger.info("Converging against the Hopf-Lax formula on %d samples", len(samples))
    else:
        logger.info("Converging against the next finer solve")
    return refine_study(build, scenario.dx, scenario.dt, scenario.levels, oracle=oracle)


def run_converge(scenario):
    write_convergence(scenario.output_dir / "convergence.csv", convergence_table(scenario))
    return 0


WORKFLOWS = {
    "solve": run_solve,
    "verify": run_verify,
    "transform": run_transform,
    "converge": run_converge,
}


def run(command, scenario):
    """Run ``command`` on ``scenario``; returns 0, or 1 when a verification check fails."""
    workflow = WORKFLOWS[command]
    scenario.output_dir.mkdir(parents=True, exist_ok=True)
    logger.info("Running %s on scenario %s into %s", command, scenario.name, scenario.output_dir)
    code = workflow(scenario)
    logger.info("Finished %s on scenario %s with exit code %d", command, scenario.name, code)
    return code
