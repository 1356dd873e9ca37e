"""
Seeded generator of admissible test curves.
"""

import logging

import numpy as np

from apps.core.exceptions import InputError

from .curves import AdmissibleCurve, Segment
from .paths import travel

logger = logging.getLogger(__name__)

MAX_SEGMENTS = 5


def random_chooser(rng):
    return lambda options: int(rng.integers(0, len(options)))


def random_curve(graph, x, horizon, v_cap, rng):
    """One curve with 1-5 segments, uniform speeds in [0, v_cap] and random-walk directions."""
    count = int(rng.integers(1, MAX_SEGMENTS + 1))
    durations = horizon * rng.dirichlet(np.ones(count))
    speeds = rng.uniform(0.0, v_cap, size=count)
    chooser = random_chooser(rng)
    segments = []
    current = x
    for duration, speed in zip(durations, speeds):
        if duration <= 0:
            continue
        legs, current = travel(graph, current, float(speed) * float(duration), chooser)
        segments.append(Segment(float(duration), float(speed) if legs else 0.0, legs))
    return AdmissibleCurve(graph, x, segments)


def sample_curves(x, graph, horizon, v_cap, n, seed):
    """
    ``n`` curves starting at ``x``; element 0 is always the constant curve.
    Deterministic for a given seed.
    """
    horizon = float(horizon)
    v_cap = float(v_cap)
    if v_cap < 0 or not np.isfinite(v_cap):
        raise InputError("Speed cap must be finite and nonnegative", v_cap=v_cap)
    if n < 1:
        raise InputError("At least one curve must be requested", n=n)

    curves = [AdmissibleCurve.constant(graph, x)]
    if horizon <= 0:
        return curves * n
    rng = np.random.default_rng(seed)
    while len(curves) < n:
        curves.append(random_curve(graph, x, horizon, v_cap, rng))
    logger.debug("Sampled %d curves from %s", n, x)
    return curves
