"""
Extended-real helpers.

Lagrangians take the value +inf outside their finite domain. numpy floats
already saturate (inf + finite = inf, min(inf, a) = a); these helpers cover
the places where values cross into text, and the one case numpy gets wrong
for us (inf - inf = nan).
"""

import math

import numpy as np

INF = math.inf


def is_finite(value):
    return bool(np.isfinite(value))


def saturating_add(*terms):
    """Sum that stays +inf as soon as one term is +inf."""
    total = 0.0
    for term in terms:
        if term == INF:
            return INF
        total += term
    return total


def format_extended(value):
    """Format a float for CSV output: ``repr`` for finite values, ``inf`` literals otherwise."""
    value = float(value)
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    if math.isnan(value):
        return "nan"
    return repr(value)


def parse_extended(text):
    """Inverse of :func:`format_extended`."""
    token = text.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return INF
    if token in ("-inf", "-infinity"):
        return -INF
    return float(token)


def finite_max(values, default=-INF):
    """Largest finite entry of ``values``; ``default`` when none is finite."""
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return default
    return float(finite.max())
