"""
Optimal trajectories read back from the solver's argmin records.
"""

import logging

import numpy as np

from apps.core.exceptions import InputError, InternalError
from apps.curves.curves import AdmissibleCurve, Segment
from apps.curves.paths import merge_legs

from .stencil import blend

logger = logging.getLogger(__name__)


def _node_move(stencil, choice):
    return stencil.speeds[stencil.speed_index[choice]], stencil.legs[choice]


def _point_move(stencil, point, layer):
    """Best move from an off-lattice point against ``layer``, with the solver's tie-breaking."""
    rows = stencil.moves_at(point)
    if not rows:
        raise InternalError("No finite move from a trajectory point", point=point)
    values = [
        cost + blend(layer[left], layer[right], weight)
        for _, left, right, weight, cost, _, _ in rows
    ]
    index, _, _, _, _, _, legs = rows[int(np.argmin(values))]
    return stencil.speeds[index], legs


def _merged(segments):
    merged = []
    for duration, speed, legs in segments:
        if merged and merged[-1][1] == speed:
            last_duration, _, last_legs = merged[-1]
            merged[-1] = (last_duration + duration, speed, merge_legs(last_legs + legs))
        else:
            merged.append((duration, speed, tuple(legs)))
    return [Segment(duration, speed, legs) for duration, speed, legs in merged]


def extract_trajectory(grid, x, t):
    """
    Follow the argmin records backwards from ``(x, t)`` to time 0.

    ``t`` must be a grid time. At lattice nodes the stored choice is replayed;
    between nodes the moves are recomputed against the same layer.
    """
    if grid.choices is None or grid.stencil is None:
        raise InternalError("Value grid carries no argmin records")
    k = grid.time_index(t)
    if k is None:
        raise InputError("Trajectories start at grid times", t=t, dt=grid.dt)

    lattice = grid.lattice
    stencil = grid.stencil
    point = lattice.graph.canonical(x)
    start = point
    pieces = []
    for level in range(k, 0, -1):
        node = lattice.locate(point)
        if node is not None:
            choice = int(grid.choices[node, level - 1])
            if not 0 <= choice < len(stencil):
                raise InternalError("Missing argmin record", node=node, step=level - 1)
            speed, legs = _node_move(stencil, choice)
        else:
            speed, legs = _point_move(stencil, point, grid.values[:, level - 1])
        if legs:
            point = lattice.graph.point_at(legs[-1].edge, legs[-1].end)
            pieces.append((grid.dt, float(speed), tuple(legs)))
        else:
            pieces.append((grid.dt, 0.0, ()))

    curve = AdmissibleCurve(lattice.graph, start, _merged(pieces))
    logger.debug("Extracted trajectory from %s at t=%g with %d segments", start, t, len(curve.segments))
    return curve
