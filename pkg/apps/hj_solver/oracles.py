"""
Independent reference values for the solver: the Hopf-Lax formula for
position-independent Lagrangians, the eikonal ball minimum, exhaustive
minimization over a finite curve family, and the a-priori bounds.
"""

import logging

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError, InstanceTooLargeError
from apps.curves.curves import AdmissibleCurve, Segment, action
from apps.curves.paths import endpoints
from apps.hamiltonian.lagrangian import hamiltonian_envelope

logger = logging.getLogger(__name__)


def hopf_lax_oracle(graph, lagrangian, u0, points, t, samples):
    """
    min over ``samples`` y of t * L(d(x, y) / t) + u0(y) for every x in ``points``.

    Exact for Lagrangians that do not depend on the position, up to the
    density of ``samples``.
    """
    if not lagrangian.is_homogeneous:
        raise InputError("The Hopf-Lax oracle needs a position-independent Lagrangian")
    t = float(t)
    if t < 0:
        raise InputError("Time must be nonnegative", t=t)
    if t == 0:
        return u0.at_many(points)

    distances = graph.distance_matrix(points, samples)
    costs = t * np.asarray(lagrangian.speed_cost(distances.ravel() / t)).reshape(distances.shape)
    totals = costs + u0.at_many(samples)[None, :]
    return totals.min(axis=1)


def ball_minimum_oracle(graph, u0, points, t, samples):
    """min of u0 over the samples within distance ``t`` of each point."""
    t = float(t)
    if t < 0:
        raise InputError("Time must be nonnegative", t=t)
    distances = graph.distance_matrix(points, samples)
    inside = distances <= t * (1.0 + 1e-12) + 1e-15
    values = np.where(inside, u0.at_many(samples)[None, :], np.inf)
    return values.min(axis=1)


def _check_caps(graph, depth, speeds, caps):
    limits = dict(hj_settings.BRUTE_FORCE_CAPS)
    limits.update(caps or {})
    sizes = {
        "edges": len(graph.edges),
        "depth": depth,
        "speeds": len(speeds),
        "directions": graph.max_degree,
    }
    for name, size in sizes.items():
        if size > limits[name]:
            raise InstanceTooLargeError(
                "Brute-force instance exceeds its caps", **{name: size, "cap": limits[name]}
            )


def brute_force_value(graph, lagrangian, u0, x, t, depth, speeds, caps=None):
    """
    Minimum of action + u0(end) over every curve made of ``depth`` segments
    of equal duration, each run at a speed from ``speeds`` along any walk.

    An upper bound on the value function; refuses instances beyond the caps.
    """
    speeds = np.unique(np.asarray(speeds, dtype=float))
    depth = int(depth)
    if depth < 1:
        raise InputError("Enumeration depth must be at least 1", depth=depth)
    if speeds.size == 0 or np.any(speeds < 0):
        raise InputError("Speeds must be nonnegative")
    _check_caps(graph, depth, speeds, caps)

    t = float(t)
    x = graph.canonical(x)
    if t == 0:
        return u0.at(x)
    duration = t / depth
    best = np.inf
    explored = 0

    def explore(point, level, spent):
        nonlocal best, explored
        if level == depth:
            explored += 1
            best = min(best, spent + u0.at(point))
            return
        for v in speeds:
            for legs, end in endpoints(graph, point, float(v) * duration):
                piece = AdmissibleCurve(graph, point, [Segment(duration, float(v), legs)])
                cost = action(piece, lagrangian, duration)
                if np.isfinite(cost):
                    explore(end, level + 1, spent + cost)

    explore(x, 0, 0.0)
    logger.debug("Brute force from %s at t=%g explored %d curves", x, t, explored)
    return float(best)


def apriori_bounds(grid, lagrangian, u0):
    """
    Node-wise bounds -c_H(0) t + inf u0 <= U(x, t) <= t L(x, 0) + u0(x),
    as two arrays shaped like ``grid.values``.
    """
    lattice = grid.lattice
    times = grid.times[None, :]
    c_h0 = hamiltonian_envelope(lagrangian.hamiltonian, lattice, 0.0)
    initial = u0.on_lattice(lattice)
    rest = lagrangian.node_values(lattice, [0.0])[:, 0]
    lower = -c_h0 * times + initial.min() + np.zeros((lattice.size, 1))
    upper = times * rest[:, None] + initial[:, None]
    return lower, upper


def global_bounds(grid, lagrangian, u0):
    """-|c_H(0)| T + inf u0 <= U <= T sup|L(., 0)| + sup u0."""
    lattice = grid.lattice
    c_h0 = hamiltonian_envelope(lagrangian.hamiltonian, lattice, 0.0)
    rest = lagrangian.node_values(lattice, [0.0])[:, 0]
    initial = u0.on_lattice(lattice)
    T = grid.horizon
    return -abs(c_h0) * T + initial.min(), T * np.abs(rest).max() + initial.max()
