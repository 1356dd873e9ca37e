"""
Semi-Lagrangian dynamic programming:

    U[x][k+1] = min over moves of ( dt * L(x, v) + U~(y, k) )

where y is the end of the move and U~ interpolates layer k along edges.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import InputError, InternalError

from .grid import ValueGrid
from .stencil import build_stencil, speed_grid

logger = logging.getLogger(__name__)


def update(stencil, layer):
    """
    One step of the scheme: returns the next layer and, per node, the index
    of the first candidate reaching the minimum.
    """
    candidates = stencil.evaluate(layer)
    best = np.minimum.reduceat(candidates, stencil.starts)
    hits = candidates == best[stencil.node]
    positions = np.where(hits, np.arange(candidates.size), candidates.size)
    first = np.minimum.reduceat(positions, stencil.starts)
    return best, first


def solve(graph, lattice, lagrangian, u0, T, dt, speeds=None, policy="geometric", n_speeds=None):
    """
    Value function on ``lattice`` over ``[0, T]``.

    ``T`` is rounded up to a whole number of steps. ``speeds`` overrides the
    speed ``policy`` with an explicit list, which must contain 0.
    """
    if lattice.graph is not graph:
        raise InputError("Lattice was built on another graph")
    T = float(T)
    dt = float(dt)
    if not dt > 0 or not np.isfinite(dt):
        raise InputError("Time step must be positive", dt=dt)
    if not T > 0 or not np.isfinite(T):
        raise InputError("Time horizon must be positive", T=T)

    n_steps = max(1, math.ceil(T / dt - 1e-9))
    horizon = n_steps * dt
    if abs(horizon - T) > 1e-12 * max(1.0, T):
        logger.warning("Horizon %g is not a multiple of dt=%g; using %g", T, dt, horizon)

    if speeds is None:
        speeds = speed_grid(lagrangian, lattice, dt, policy=policy, n_speeds=n_speeds)
    else:
        speeds = speed_grid(lagrangian, lattice, dt, policy=speeds)
    stencil = build_stencil(lattice, lagrangian, dt, speeds)

    initial = np.asarray(u0.on_lattice(lattice), dtype=float)
    if not np.all(np.isfinite(initial)):
        raise InputError("Initial datum must be finite at every node")

    values = np.empty((lattice.size, n_steps + 1))
    choices = np.empty((lattice.size, n_steps), dtype=int)
    values[:, 0] = initial
    report_every = max(1, n_steps // 10)
    logger.info(
        "Solving on %d nodes, %d steps of %g with %d speeds",
        lattice.size,
        n_steps,
        dt,
        len(speeds),
    )
    for k in range(n_steps):
        values[:, k + 1], choices[:, k] = update(stencil, values[:, k])
        if (k + 1) % report_every == 0:
            logger.debug("Step %d/%d done", k + 1, n_steps)

    if not np.all(np.isfinite(values)):
        raise InternalError("Solver produced non-finite values")
    return ValueGrid(lattice, dt, horizon, values, choices, stencil)


def step(grid, k):
    """Recompute layer ``k + 1`` of ``grid`` from layer ``k``."""
    if grid.stencil is None:
        raise InputError("Grid was not produced by the solver")
    if not 0 <= k < grid.n_steps:
        raise InputError("Step index outside the grid", k=k)
    layer, _ = update(grid.stencil, grid.values[:, k])
    return layer


@dataclass(frozen=True, eq=False)
class Problem:
    """Everything :func:`solve` needs, so a problem can be solved again with other data."""

    graph: object
    lattice: object
    hamiltonian: object
    lagrangian: object
    u0: object
    T: float
    dt: float
    speeds: object = "geometric"
    n_speeds: int = None

    def solve(self, u0=None, dt=None):
        options = {"policy": self.speeds, "n_speeds": self.n_speeds}
        if not isinstance(self.speeds, str):
            options = {"speeds": self.speeds}
        return solve(
            self.graph,
            self.lattice,
            self.lagrangian,
            self.u0 if u0 is None else u0,
            self.T,
            self.dt if dt is None else dt,
            **options,
        )
