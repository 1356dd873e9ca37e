"""
Candidate moves of the semi-Lagrangian update.

From a point x, a move rests or runs at speed v > 0 for one time step along
every walk of length v * dt, ending at a point whose value is interpolated
between the two lattice nodes of its cell. Candidates of a node are ordered
by speed, then by the edge the walk leaves on; the update keeps the first
minimum, so ties go to the lowest speed and then the lowest edge id.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import ConfigurationError, InputError
from apps.curves.paths import endpoints
from apps.hamiltonian.lagrangian import max_speed_bound

logger = logging.getLogger(__name__)

SPEED_POLICIES = ("geometric", "uniform")


def speed_cap(lagrangian, lattice, dt):
    """min(global V_L, STENCIL_CELLS * dx / dt)."""
    reach = hj_settings.STENCIL_CELLS * lattice.dx / dt
    return min(max_speed_bound(lagrangian, lattice), reach)


def speed_refinement(lattice):
    """
    Growth factor of the default speed grid: 1 up to ``SPEED_REFERENCE_CELLS``
    cells on the shortest edge, then proportional to the cell count.
    """
    return max(1.0, lattice.min_cells / hj_settings.SPEED_REFERENCE_CELLS)


def speed_grid(lagrangian, lattice, dt, policy="geometric", n_speeds=None):
    """
    Sorted speeds of the update, always starting with 0.

    ``policy`` is ``"geometric"``, ``"uniform"`` or an explicit list of speeds.
    Without ``n_speeds`` the default grid gets denser as the lattice is
    refined, so that the speed resolution shrinks with dx.
    """
    cap = speed_cap(lagrangian, lattice, dt)

    if not isinstance(policy, str):
        speeds = np.unique(np.asarray(list(policy), dtype=float))
        if speeds.size == 0 or np.any(speeds < 0) or not np.all(np.isfinite(speeds)):
            raise InputError("Speeds must be finite and nonnegative")
        if speeds[0] != 0.0:
            raise ConfigurationError("The speed list must contain 0")
        dropped = speeds[speeds > cap * (1.0 + 1e-12)]
        if dropped.size:
            logger.warning("Dropping speeds above the cap %g: %s", cap, dropped.tolist())
        return speeds[speeds <= cap * (1.0 + 1e-12)]

    if policy not in SPEED_POLICIES:
        raise InputError("Unknown speed policy", policy=policy)
    n = hj_settings.SPEED_COUNT if n_speeds is None else int(n_speeds)
    if n < 2:
        raise InputError("A speed grid needs at least two speeds", n_speeds=n)
    if not cap > 0:
        logger.warning("Speed cap is %g; only resting moves are available", cap)
        return np.array([0.0])

    factor = speed_refinement(lattice) if n_speeds is None else 1.0
    positive = n - 1
    if policy == "uniform":
        positive = math.ceil(positive * factor)
        return cap * np.arange(positive + 1) / positive
    if positive == 1:
        return np.array([0.0, cap])
    spread = hj_settings.GEOMETRIC_SPEED_RANGE
    if factor > 1.0:
        # the ratio between neighbours shrinks like 1 / factor while the
        # slowest speed drops like cap / factor
        refined = spread * factor
        positive = math.ceil((positive - 1) * factor * math.log(refined) / math.log(spread)) + 1
        spread = refined
        logger.debug("Refined speed grid: %d speeds over a range of %g", positive + 1, spread)
    ratio = spread ** (1.0 / (positive - 1))
    speeds = cap * ratio ** -np.arange(positive - 1, -1, -1, dtype=float)
    return np.concatenate([[0.0], speeds])


def blend(lower, upper, weight):
    """
    Linear interpolation, nondecreasing in ``lower`` and ``upper`` under
    floating point rounding and exact when both ends agree.
    """
    mix = (1.0 - weight) * lower + weight * upper
    return np.minimum(np.maximum(mix, np.minimum(lower, upper)), np.maximum(lower, upper))


def point_moves(lattice, point, speeds, costs, dt):
    """
    Candidate rows ``(speed index, left, right, weight, cost, first edge, legs)``
    from ``point``; ``costs`` holds L(point, v) for every speed.
    """
    graph = lattice.graph
    rows = []
    for j, v in enumerate(speeds):
        cost = costs[j]
        if not np.isfinite(cost):
            continue
        if v == 0.0:
            left, right, weight = lattice.cell_of(point)
            rows.append((j, left, right, weight, dt * cost, -1, ()))
            continue
        for legs, end in endpoints(graph, point, float(v) * dt):
            left, right, weight = lattice.cell_of(end)
            rows.append((j, left, right, weight, dt * cost, legs[0].edge, legs))
    return rows


@dataclass(frozen=True, eq=False)
class Stencil:
    """Flat arrays of every candidate, grouped by node; ``starts[i]`` opens node ``i``'s group."""

    lattice: object
    lagrangian: object
    dt: float
    speeds: np.ndarray
    node: np.ndarray
    speed_index: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weight: np.ndarray
    cost: np.ndarray
    edge: np.ndarray
    legs: tuple
    starts: np.ndarray

    def __len__(self):
        return self.node.size

    def candidates(self, node):
        """Slice of the candidates of lattice node ``node``."""
        stop = self.starts[node + 1] if node + 1 < self.starts.size else self.node.size
        return slice(int(self.starts[node]), int(stop))

    def evaluate(self, layer):
        """Value of every candidate against the node values ``layer``."""
        return self.cost + blend(layer[self.left], layer[self.right], self.weight)

    def moves_at(self, point):
        """Candidate rows of an arbitrary point, ordered like the rows of a node."""
        costs = np.atleast_1d(self.lagrangian.value(point, self.speeds))
        return point_moves(self.lattice, point, self.speeds, costs, self.dt)


def build_stencil(lattice, lagrangian, dt, speeds):
    speeds = np.asarray(speeds, dtype=float)
    costs = lagrangian.node_values(lattice, speeds)
    columns = [[] for _ in range(7)]
    nodes = []
    for i, point in enumerate(lattice.points):
        rows = point_moves(lattice, point, speeds, costs[i], dt)
        if not rows:
            raise ConfigurationError(
                "No move with finite cost from a lattice node",
                node=i,
                point=point,
            )
        nodes.extend([i] * len(rows))
        for column, values in zip(columns, zip(*rows)):
            column.extend(values)

    node = np.asarray(nodes, dtype=int)
    starts = np.flatnonzero(np.r_[True, node[1:] != node[:-1]])
    stencil = Stencil(
        lattice=lattice,
        lagrangian=lagrangian,
        dt=float(dt),
        speeds=speeds,
        node=node,
        speed_index=np.asarray(columns[0], dtype=int),
        left=np.asarray(columns[1], dtype=int),
        right=np.asarray(columns[2], dtype=int),
        weight=np.asarray(columns[3], dtype=float),
        cost=np.asarray(columns[4], dtype=float),
        edge=np.asarray(columns[5], dtype=int),
        legs=tuple(columns[6]),
        starts=starts,
    )
    logger.debug(
        "Built stencil with %d candidates over %d nodes and %d speeds",
        len(stencil),
        lattice.size,
        speeds.size,
    )
    return stencil
