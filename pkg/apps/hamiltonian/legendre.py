"""
Legendre-Fenchel transforms between Hamiltonians and Lagrangians.
"""

import logging

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

from .lagrangian import check_speeds, default_p_max

logger = logging.getLogger(__name__)


def grid_conjugate(hamiltonian, point, v, p_max=None, n_p=None):
    """
    sup over p in {0, ..., p_max} (n_p + 1 points) of p v - H(x, p).

    The supremum is declared +inf when the maximizer is the last grid point
    and the objective is still increasing there.
    """
    v = float(v)
    p_max = default_p_max(v) if p_max is None else float(p_max)
    n_p = hj_settings.LEGENDRE_N_P if n_p is None else int(n_p)
    if p_max <= 0 or n_p < 1:
        raise InputError("The p-grid needs p_max > 0 and n_p >= 1", p_max=p_max, n_p=n_p)

    p = np.linspace(0.0, p_max, n_p + 1)
    objective = p * v - np.asarray(hamiltonian.value(point, p), dtype=float)
    k = int(np.argmax(objective))
    if k == n_p and objective[-1] - objective[-2] > 0:
        return np.inf
    return float(objective[k])


def legendre_transform(hamiltonian, point, v, p_max=None, n_p=None, method="auto"):
    """
    L(x, v) = sup_p (p v - H(x, p)).

    ``method="auto"`` uses the closed form whenever the Hamiltonian has one;
    ``method="grid"`` forces the discrete transform.
    """
    v = float(check_speeds(v))
    if method not in ("auto", "grid"):
        raise InputError("Unknown transform method", method=method)

    if hamiltonian.form == "tabulated":
        hamiltonian.require_admissible_row(hamiltonian.row_at(point))
    if method == "auto" and hamiltonian.closed_form:
        return hamiltonian.lagrangian().value(point, v)
    return grid_conjugate(hamiltonian, point, v, p_max=p_max, n_p=n_p)


def dual_roundtrip(lagrangian, point, p, v_max, n_v):
    """
    Discrete sup over v in [0, min(v_max, V_L(x))] of p v - L(x, v).

    Recovers H(x, p) when H is convex, nondecreasing and the grid is fine.
    """
    p = float(p)
    if p < 0:
        raise InputError("The round trip is defined for p >= 0", p=p)
    v_max = float(v_max)
    n_v = int(n_v)
    if v_max <= 0 or n_v < 1:
        raise InputError("The v-grid needs v_max > 0 and n_v >= 1", v_max=v_max, n_v=n_v)

    v_top = min(v_max, lagrangian.max_speed(point))
    v = np.linspace(0.0, v_top, n_v + 1)
    objective = p * v - np.asarray(lagrangian.value(point, v), dtype=float)
    return float(np.max(objective))


def symmetric_roundtrip(lagrangian, point, p, v_max, n_v):
    """Discrete sup over real v of p v - L(x, |v|), defined for every real p."""
    v_max = float(v_max)
    n_v = int(n_v)
    if v_max <= 0 or n_v < 1:
        raise InputError("The v-grid needs v_max > 0 and n_v >= 1", v_max=v_max, n_v=n_v)

    v_top = min(v_max, lagrangian.max_speed(point))
    v = np.linspace(-v_top, v_top, 2 * n_v + 1)
    objective = float(p) * v - np.asarray(lagrangian.value(point, np.abs(v)), dtype=float)
    return float(np.max(objective))


def conjugacy_gap(hamiltonian, lagrangian, point, p, v):
    """H(x, p) - (p v - L(x, v)); nonnegative whenever L(x, v) is finite."""
    cost = lagrangian.value(point, v)
    if not np.isfinite(cost):
        return np.inf
    return float(hamiltonian.value(point, p) - (float(p) * float(v) - cost))
