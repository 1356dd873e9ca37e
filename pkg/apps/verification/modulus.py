"""
Empirical modulus of continuity of a value grid in the space x time metric
d(x, y) + |t - s|.
"""

import logging
from dataclasses import dataclass

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

from .checks import node_counterexample
from .report import CheckRecord

logger = logging.getLogger(__name__)

LADDER_LENGTH = 6


@dataclass(frozen=True)
class ModulusTable:
    deltas: np.ndarray
    omegas: np.ndarray
    anchors: int
    witnesses: tuple = ()

    def __iter__(self):
        return iter(zip(self.deltas.tolist(), self.omegas.tolist()))

    def __len__(self):
        return self.deltas.size

    def at(self, delta):
        """Largest tabulated omega at a ladder rung not beyond ``delta``."""
        index = np.searchsorted(self.deltas, delta, side="right") - 1
        if index < 0:
            raise InputError("delta is below the ladder", delta=delta)
        return float(self.omegas[index])


def default_deltas(grid):
    base = grid.lattice.dx + grid.dt
    return base * 2.0 ** np.arange(LADDER_LENGTH)


def estimate_modulus(grid, deltas=None, anchors=None, seed=0):
    """
    omega(delta) = max |U(x, t) - U(y, s)| over d(x, y) + |t - s| <= delta,
    where (x, t) runs over ``anchors`` random grid entries and (y, s) over
    the whole grid.
    """
    deltas = default_deltas(grid) if deltas is None else np.sort(np.asarray(deltas, dtype=float))
    if deltas.size == 0 or np.any(deltas <= 0):
        raise InputError("Modulus deltas must be positive")
    anchors = hj_settings.MODULUS_ANCHORS if anchors is None else int(anchors)

    rng = np.random.default_rng(seed)
    lattice = grid.lattice
    n_entries = grid.values.size
    picks = rng.choice(n_entries, size=min(anchors, n_entries), replace=False)
    nodes, steps = np.unravel_index(picks, grid.values.shape)

    distances = lattice.distances
    times = grid.times
    omegas = np.zeros(deltas.size)
    witnesses = [(int(nodes[0]), int(steps[0]))] * deltas.size
    for node, k in zip(nodes, steps):
        separation = distances[node][:, None] + np.abs(times - times[k])[None, :]
        jumps = np.abs(grid.values - grid.values[node, k])
        for index, delta in enumerate(deltas):
            within = separation <= delta * (1.0 + 1e-12)
            jump = float(jumps[within].max())
            if jump > omegas[index]:
                omegas[index] = jump
                witnesses[index] = (int(node), int(k))

    logger.debug("Modulus over %d anchors: %s", len(picks), list(zip(deltas, omegas)))
    return ModulusTable(deltas, omegas, len(picks), tuple(witnesses))


def check_arcwise_continuity(grid, table, constant, tol):
    """omega(delta) <= constant * delta on every rung, up to ``tol``."""
    excess = table.omegas - constant * table.deltas
    index = int(np.argmax(excess))
    worst = float(excess[index])
    counterexample = None
    if worst > tol:
        node, k = table.witnesses[index]
        counterexample = node_counterexample(grid, node, k)
    return CheckRecord(
        "arcwise_continuity",
        len(table) * table.anchors,
        worst,
        float(tol),
        counterexample,
    )
