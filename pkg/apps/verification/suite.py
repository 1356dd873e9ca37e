"""
The full verification suite of a solved problem.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.hamiltonian.lagrangian import hamiltonian_envelope
from apps.hj_solver.initial import raised
from apps.hj_solver.trajectory import extract_trajectory

from .checks import (
    CurveSampler,
    check_apriori_bounds,
    check_comparison,
    check_dpp_determinism,
    check_dpp_semigroup,
    check_global_bounds,
    check_initial_condition,
    check_metric_viscosity,
    check_monotone_update,
    check_suboptimality,
    check_superoptimality,
)
from .modulus import check_arcwise_continuity, estimate_modulus
from .report import VerificationReport, merge_records

logger = logging.getLogger(__name__)

CORRUPTION_FACTOR = 10.0


@dataclass(frozen=True)
class VerificationParams:
    seed: int = 0
    curves: int = 200
    triples: int = 20
    probes: int = 20
    v_cap: float = None
    tolerance_factor: float = 1.0
    corrupt: bool = False
    comparison_shift: float = 0.5

    def sampler(self, offset=0):
        return CurveSampler(self.curves, self.triples, self.v_cap, self.seed + offset)


@dataclass(frozen=True)
class Tolerances:
    """Tolerances of every check, all proportional to (dx + dt) * C1."""

    base: float
    stability: float

    @property
    def suboptimality(self):
        return 3.0 * self.base

    @property
    def superoptimality(self):
        return 5.0 * self.base

    @property
    def bounds(self):
        return 1e-9 + 2.0 * self.base

    @property
    def viscosity(self):
        return 10.0 * self.base

    @property
    def continuity(self):
        return 2.0 * self.base

    @property
    def semigroup(self):
        return 2.0 * self.base


def stability_constant(problem):
    """C1 = 1 + |c_H(0)| + sup |L(., 0)| + Lip(u0)."""
    lattice = problem.lattice
    c_h0 = hamiltonian_envelope(problem.lagrangian.hamiltonian, lattice, 0.0)
    rest = problem.lagrangian.node_values(lattice, [0.0])[:, 0]
    return 1.0 + abs(c_h0) + float(np.abs(rest).max()) + problem.u0.lipschitz_estimate(lattice)


def tolerances(problem, grid, factor=1.0):
    constant = stability_constant(problem)
    base = (grid.lattice.dx + grid.dt) * constant * float(factor)
    return Tolerances(base=base, stability=constant)


@dataclass
class SuiteContext:
    """A solved problem together with what the suite should probe."""

    problem: object
    grid: object
    params: VerificationParams = field(default_factory=VerificationParams)
    probes: list = field(default_factory=list)


def corrupt_grid(grid, amount):
    """Lower the entry at the middle node and the middle time step by ``amount``."""
    node = grid.lattice.size // 2
    k = max(1, grid.n_steps // 2)
    values = np.array(grid.values)
    values[node, k] -= amount
    logger.warning("Corrupting U at node %d, step %d by %g", node, k, amount)
    return grid.with_values(values), (grid.lattice.points[node], k * grid.dt)


def snap_probe(grid, point, t):
    k = grid.time_index(t)
    if k is None:
        k = int(np.clip(round(float(t) / grid.dt), 0, grid.n_steps))
        logger.warning("Snapping probe time %g to the grid time %g", t, k * grid.dt)
    return grid.graph.canonical(point), k * grid.dt


def superoptimality_probes(context, grid, extra=()):
    rng = np.random.default_rng(context.params.seed + 1)
    probes = [snap_probe(grid, point, t) for point, t in context.probes]
    for _ in range(context.params.probes):
        node = int(rng.integers(0, grid.lattice.size))
        k = int(rng.integers(1, grid.n_steps + 1))
        probes.append((grid.lattice.points[node], k * grid.dt))
    return probes + list(extra)


def run_suite(context):
    """Run every check on ``context.grid`` and collect the records in one report."""
    problem, params = context.problem, context.params
    grid = context.grid
    tol = tolerances(problem, grid, params.tolerance_factor)
    logger.info("Verifying with C1=%g and base tolerance %g", tol.stability, tol.base)

    extra = ()
    if params.corrupt:
        grid, probe = corrupt_grid(grid, CORRUPTION_FACTOR * tol.suboptimality)
        extra = (probe,)

    lagrangian, u0 = problem.lagrangian, problem.u0
    report = VerificationReport()
    report.add(check_initial_condition(grid, u0))
    report.add(check_apriori_bounds(grid, lagrangian, u0, tol.bounds))
    report.add(check_global_bounds(grid, lagrangian, u0, tol.bounds))
    report.add(check_suboptimality(grid, lagrangian, params.sampler(), tol.suboptimality))

    records = []
    for point, t in superoptimality_probes(context, grid, extra):
        if t == 0:
            continue
        witness = extract_trajectory(grid, point, t)
        records.append(
            check_superoptimality(grid, lagrangian, witness, point, t, tol.superoptimality)
        )
    report.add(merge_records("superoptimality", records, tol.superoptimality))

    report.add(
        check_metric_viscosity(grid, problem.hamiltonian, params.sampler(offset=2), tol.viscosity)
    )
    degenerate = check_comparison(grid, grid, 1e-9, check="comparison_degenerate")
    report.add(degenerate)

    lattice = problem.lattice
    nodes = np.arange(lattice.size)
    increments = params.comparison_shift * (nodes % 3) / 2.0
    upper = problem.solve(u0=raised(u0, lattice, increments))
    report.add(check_comparison(grid, upper, tol.suboptimality, check="comparison_ordered"))
    report.add(check_monotone_update(grid, upper))
    report.add(check_dpp_determinism(grid))
    doubled = problem.solve(dt=2.0 * grid.dt)
    report.add(check_dpp_semigroup(grid, doubled, tol.semigroup))

    table = estimate_modulus(grid, seed=params.seed)
    report.add(check_arcwise_continuity(grid, table, tol.stability, tol.continuity))

    logger.info(
        "Verification finished: %d checks, %d failed",
        len(report.records),
        len(report.failures),
    )
    return report
