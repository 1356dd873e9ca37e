"""
Executable versions of the optimality inequalities, the comparison principle
and the bounds on the value function.

Checks never raise on a violated inequality: they return a CheckRecord with
the worst violation found and, when it exceeds the tolerance, the curve and
times that produced it.
"""

import logging
from dataclasses import dataclass

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError
from apps.curves.curves import AdmissibleCurve, action, shift
from apps.curves.sampling import sample_curves
from apps.hamiltonian.lagrangian import max_speed_bound
from apps.hj_solver.oracles import apriori_bounds, global_bounds
from apps.hj_solver.scheme import step

from .report import CheckRecord, Counterexample

logger = logging.getLogger(__name__)

DEFAULT_SPEED_CAP = 2.0
VISCOSITY_CELLS = 4
SMOOTHNESS_RATIO = 10.0


@dataclass(frozen=True)
class CurveSampler:
    """How many (x, t, h) triples to draw and how many curves to try from each."""

    curves: int = 200
    triples: int = 20
    v_cap: float = None
    seed: int = 0

    def speed_cap(self, lagrangian, lattice):
        bound = max_speed_bound(lagrangian, lattice)
        cap = DEFAULT_SPEED_CAP if self.v_cap is None else float(self.v_cap)
        return min(cap, bound)

    def rng(self):
        return np.random.default_rng(self.seed)


def _seed(rng):
    return int(rng.integers(0, 2**32))


def node_counterexample(grid, node, k, h=0.0):
    """Counterexample for grid-entry checks: the constant curve at the offending node."""
    point = grid.lattice.points[node]
    return Counterexample(
        AdmissibleCurve.constant(grid.graph, point),
        point,
        float(k * grid.dt),
        float(h),
    )


def _entry_record(check, grid, excess, tolerance):
    """Record for an array of per-entry violations shaped like ``grid.values``."""
    node, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = float(excess[node, k])
    counterexample = None
    if worst > tolerance:
        counterexample = node_counterexample(grid, int(node), int(k))
    return CheckRecord(check, int(excess.size), worst, float(tolerance), counterexample)


def check_initial_condition(grid, u0):
    """U at time 0 must reproduce the sampled initial datum exactly."""
    initial = u0.on_lattice(grid.lattice)
    excess = np.abs(grid.values[:, :1] - initial[:, None])
    return _entry_record("initial_condition", grid, excess, 0.0)


def check_apriori_bounds(grid, lagrangian, u0, tol):
    lower, upper = apriori_bounds(grid, lagrangian, u0)
    excess = np.maximum(lower - grid.values, grid.values - upper)
    return _entry_record("apriori_bounds", grid, excess, tol)


def check_global_bounds(grid, lagrangian, u0, tol):
    low, high = global_bounds(grid, lagrangian, u0)
    excess = np.maximum(low - grid.values, grid.values - high)
    return _entry_record("global_bounds", grid, excess, tol)


def check_suboptimality(grid, lagrangian, sampler, tol):
    """
    u(x, t) - int_0^h L[xi] - u(xi(h), t - h) <= tol over sampled triples
    (x, t, h) and sampled curves from x.

    ``x`` is a lattice node, ``t`` a positive grid time and ``h`` a grid time
    in ``[0, t)``. Curves whose action is infinite are counted and skipped.
    """
    rng = sampler.rng()
    lattice = grid.lattice
    cap = sampler.speed_cap(lagrangian, lattice)
    worst = -np.inf
    counterexample = None
    samples = 0
    for _ in range(sampler.triples):
        node = int(rng.integers(0, lattice.size))
        k = int(rng.integers(1, grid.n_steps + 1))
        j = int(rng.integers(0, k))
        x = lattice.points[node]
        t, h = k * grid.dt, j * grid.dt
        here = grid.values[node, k]
        for curve in sample_curves(x, grid.graph, h, cap, sampler.curves, _seed(rng)):
            samples += 1
            cost = action(curve, lagrangian, h)
            if not np.isfinite(cost):
                continue
            violation = here - cost - grid.value_at(curve.evaluate(h), t - h)
            if violation > worst:
                worst = float(violation)
                counterexample = Counterexample(curve, x, t, h)

    logger.debug("Suboptimality: %d samples, worst violation %g", samples, worst)
    return CheckRecord(
        "suboptimality",
        samples,
        worst,
        float(tol),
        counterexample if worst > tol else None,
    )


def check_superoptimality(grid, lagrangian, witness, x, t, eps):
    """
    int_0^h L[xi] + u(xi(h), t - h) - u(x, t) <= eps for every grid time h
    in ``[0, t)``, along the curve ``witness``.
    """
    x = grid.graph.canonical(x)
    if grid.graph.geodesic_distance(witness.start, x) > hj_settings.CURVE_TOLERANCE:
        raise InputError("Witness curve does not start at x", start=witness.start, x=x)
    k = grid.time_index(t)
    if k is None:
        raise InputError("Superoptimality is checked at grid times", t=t, dt=grid.dt)

    here = grid.value_at(x, t)
    worst = -np.inf
    worst_h = 0.0
    running = 0.0
    for j in range(k):
        h = j * grid.dt
        if j > 0:
            running += action(shift(witness, (j - 1) * grid.dt), lagrangian, grid.dt)
        slack = running + grid.value_at(witness.evaluate(h), t - h) - here
        if slack > worst:
            worst, worst_h = float(slack), h

    counterexample = None
    if worst > eps:
        counterexample = Counterexample(witness, x, float(k * grid.dt), worst_h)
    return CheckRecord("superoptimality", k, worst, float(eps), counterexample)


def _smooth(first, second, floor):
    return abs(second) <= SMOOTHNESS_RATIO * (abs(first) + floor)


def check_metric_viscosity(grid, hamiltonian, sampler, tol, smoothness_floor=None):
    """
    Finite-difference residual q + H(xi(s), |p|) along sampled curves with
    speeds at most 1.

    On every curve, w(s, t) = u(xi(s), t) is sampled on a centred stencil of
    ``VISCOSITY_CELLS`` space and time steps around (s0, t0); stencils whose
    second differences are large compared to the first differences are
    treated as kinks and skipped.
    """
    rng = sampler.rng()
    lattice = grid.lattice
    hs = VISCOSITY_CELLS * lattice.dx
    ks = VISCOSITY_CELLS
    floor = (lattice.dx + grid.dt) if smoothness_floor is None else float(smoothness_floor)

    first_k = max(ks, int(np.ceil(grid.n_steps / 2)))
    last_k = grid.n_steps - ks
    if last_k < first_k:
        logger.warning("Horizon too short for the viscosity stencil; no samples taken")
        return CheckRecord("metric_viscosity", 0, -np.inf, float(tol))

    ht = ks * grid.dt
    per_anchor = max(1, sampler.curves // max(1, sampler.triples))
    worst = -np.inf
    counterexample = None
    samples = 0
    for _ in range(sampler.triples):
        node = int(rng.integers(0, lattice.size))
        k0 = int(rng.integers(first_k, last_k + 1))
        x = lattice.points[node]
        t0 = k0 * grid.dt
        for curve in sample_curves(x, grid.graph, 2 * hs, 1.0, per_anchor, _seed(rng)):
            behind, centre, ahead = (curve.evaluate(s) for s in (0.0, hs, 2 * hs))
            w_behind = grid.value_at(behind, t0)
            w_centre = grid.value_at(centre, t0)
            w_ahead = grid.value_at(ahead, t0)
            w_before = grid.value_at(centre, t0 - ht)
            w_after = grid.value_at(centre, t0 + ht)

            first_s = 0.5 * (w_ahead - w_behind)
            first_t = 0.5 * (w_after - w_before)
            if not (
                _smooth(first_s, w_ahead - 2 * w_centre + w_behind, floor)
                and _smooth(first_t, w_after - 2 * w_centre + w_before, floor)
            ):
                continue
            samples += 1
            p, q = first_s / hs, first_t / ht
            residual = q + hamiltonian.value(centre, abs(p))
            if residual > worst:
                worst = float(residual)
                counterexample = Counterexample(curve, x, t0, hs)

    logger.debug("Metric viscosity: %d smooth stencils, worst residual %g", samples, worst)
    return CheckRecord(
        "metric_viscosity",
        samples,
        worst,
        float(tol),
        counterexample if worst > tol else None,
    )


def check_comparison(u_sub, v_super, tol, check="comparison"):
    """max over the grid of (u - v) <= max over x of (u - v) at t = 0, plus ``tol``."""
    if not u_sub.same_shape(v_super):
        raise InputError("Comparison needs grids on the same lattice and time steps")
    gap = u_sub.values - v_super.values
    initial = float(gap[:, 0].max())
    excess = gap - initial
    return _entry_record(check, u_sub, excess, tol)


def check_monotone_update(lower, upper):
    """Grids solved from ordered initial data stay ordered at every entry, exactly."""
    if not lower.same_shape(upper):
        raise InputError("Monotonicity needs grids on the same lattice and time steps")
    excess = lower.values - upper.values
    return _entry_record("monotone_update", lower, excess, 0.0)


def check_dpp_determinism(grid):
    """Re-running every step of the scheme reproduces the stored layers bit for bit."""
    excess = np.zeros((grid.lattice.size, grid.n_steps))
    for k in range(grid.n_steps):
        excess[:, k] = np.abs(step(grid, k) - grid.values[:, k + 1])
    node, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = float(excess[node, k])
    counterexample = node_counterexample(grid, int(node), int(k) + 1) if worst > 0 else None
    return CheckRecord("dpp_determinism", int(excess.size), worst, 0.0, counterexample)


def check_dpp_semigroup(grid, doubled, tol):
    """
    Two steps of ``dt`` against one step of ``2 dt`` from the same datum,
    compared at every time both grids share.
    """
    if doubled.lattice is not grid.lattice:
        raise InputError("Semigroup check needs both grids on the same lattice")
    if not np.isclose(doubled.dt, 2.0 * grid.dt):
        raise InputError("Second grid must use twice the time step", dt=grid.dt, doubled=doubled.dt)
    common = min(doubled.n_steps, grid.n_steps // 2)
    if common == 0:
        logger.warning("Horizon shorter than a doubled step; semigroup check is empty")
        return CheckRecord("dpp_semigroup", 0, 0.0, float(tol))
    excess = np.abs(grid.values[:, : 2 * common + 1 : 2] - doubled.values[:, : common + 1])
    node, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = float(excess[node, k])
    counterexample = None
    if worst > tol:
        counterexample = node_counterexample(grid, int(node), 2 * int(k))
    return CheckRecord("dpp_semigroup", int(excess.size), worst, float(tol), counterexample)
