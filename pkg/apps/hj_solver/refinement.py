"""
Grid convergence studies: solve at successive halvings of (dx, dt) and
compare the final layer with an oracle or with the next finer solve.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from apps.core.exceptions import InputError

logger = logging.getLogger(__name__)

NEGLIGIBLE_ERROR = 1e-14


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    dx: float
    dt: float
    max_error: float
    observed_order: float = None


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple

    @property
    def errors(self):
        return [row.max_error for row in self.rows]

    @property
    def overall_order(self):
        """Average order between the coarsest and the finest level, ``None`` if undefined."""
        first, last = self.rows[0], self.rows[-1]
        if first.max_error <= NEGLIGIBLE_ERROR or last.max_error <= NEGLIGIBLE_ERROR:
            return None
        return math.log(first.max_error / last.max_error) / math.log(first.dx / last.dx)

    def is_monotone(self, slack=0.0):
        errors = self.errors
        return all(b <= a + slack for a, b in zip(errors, errors[1:]))


def _order(previous, row):
    if previous.max_error <= NEGLIGIBLE_ERROR or row.max_error <= NEGLIGIBLE_ERROR:
        return None
    return math.log(previous.max_error / row.max_error) / math.log(previous.dx / row.dx)


def refine_study(build, dx, dt, levels, oracle=None):
    """
    ``build(dx, dt)`` returns a solved ValueGrid; ``oracle(points, t)`` the
    exact values at the given points. Level ``i`` uses ``dx / 2**i`` and
    ``dt / 2**i``. Without an oracle, each level is compared with the solve
    one level finer, interpolated onto its nodes.
    """
    levels = int(levels)
    if levels < 2:
        raise InputError("A convergence study needs at least two levels", levels=levels)

    grids = []
    total = levels if oracle is not None else levels + 1
    for level in range(total):
        scale = 2.0**level
        grid = build(dx / scale, dt / scale)
        logger.info("Refinement level %d: %d nodes, %d steps", level, grid.lattice.size, grid.n_steps)
        grids.append(grid)

    rows = []
    for level in range(levels):
        grid = grids[level]
        points = grid.lattice.points
        computed = grid.values[:, -1]
        if oracle is not None:
            exact = np.asarray(oracle(points, grid.horizon), dtype=float)
        else:
            finer = grids[level + 1]
            exact = np.array([finer.value_at(point, grid.horizon) for point in points])
        row = ConvergenceRow(
            level=level,
            dx=dx / 2.0**level,
            dt=dt / 2.0**level,
            max_error=float(np.max(np.abs(computed - exact))),
        )
        if rows:
            row = replace(row, observed_order=_order(rows[-1], row))
        rows.append(row)
    return ConvergenceTable(tuple(rows))
