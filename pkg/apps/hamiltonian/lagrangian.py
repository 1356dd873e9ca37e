"""
Lagrangians L(x, v) = sup_p (p v - H(x, p)) for v >= 0, valued in the
extended reals (+inf outside the finite domain).
"""

import logging

import numpy as np

from apps.core.conf import hj_settings
from apps.core.exceptions import InputError

logger = logging.getLogger(__name__)


def check_speeds(v):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(np.isnan(v)):
        raise InputError("Speeds must be nonnegative")
    return v


def _scalar_or_array(result, v):
    return float(result) if np.ndim(v) == 0 else result


class Lagrangian:
    """Common accessors; subclasses implement ``value`` and ``node_values``."""

    def __init__(self, hamiltonian):
        self.hamiltonian = hamiltonian

    def __repr__(self):
        return f"{type(self).__name__}({self.hamiltonian!r})"

    @property
    def is_homogeneous(self):
        return self.hamiltonian.is_homogeneous

    def value(self, point, v):
        raise NotImplementedError

    def node_values(self, lattice, v):
        """Matrix of L at every node of ``lattice`` (rows) and every speed of ``v`` (columns)."""
        v = np.atleast_1d(check_speeds(v))
        return np.stack([np.atleast_1d(self.value(point, v)) for point in lattice.points])

    def value_many(self, graph, edge_ids, offsets, v):
        """L at many points for one speed ``v``."""
        return np.array(
            [
                self.value(graph.point_at(edge_id, offset), v)
                for edge_id, offset in zip(edge_ids, offsets)
            ],
            dtype=float,
        )

    def speed_cost(self, v):
        """L(v) for a spatially homogeneous Lagrangian."""
        if not self.is_homogeneous:
            raise InputError("Lagrangian depends on the position")
        return self._homogeneous_value(v)

    def _homogeneous_value(self, v):
        raise NotImplementedError

    def max_speed(self, point):
        """V_L(x): supremum of the speeds with finite cost at ``point``."""
        raise NotImplementedError

    def node_max_speeds(self, lattice):
        return lattice.on_nodes(self.max_speed)


class CompositeLagrangian(Lagrangian):
    """Closed form ``L(x, v) = sigma(x) * l(v / sigma(x)) + f(x)``."""

    def value(self, point, v):
        v = check_speeds(v)
        sigma = self.hamiltonian.sigma.at(point)
        result = sigma * self.hamiltonian.profile.conjugate(v / sigma) + self.hamiltonian.f.at(point)
        return _scalar_or_array(result, v)

    def node_values(self, lattice, v):
        v = np.atleast_1d(check_speeds(v))
        sigma = self.hamiltonian.sigma.on_lattice(lattice)[:, None]
        f = self.hamiltonian.f.on_lattice(lattice)[:, None]
        return sigma * self.hamiltonian.profile.conjugate(v[None, :] / sigma) + f

    def value_many(self, graph, edge_ids, offsets, v):
        v = float(check_speeds(v))
        sigma = self.hamiltonian.sigma.at_many(edge_ids, offsets)
        f = self.hamiltonian.f.at_many(edge_ids, offsets)
        return sigma * self.hamiltonian.profile.conjugate(v / sigma) + f

    def _homogeneous_value(self, v):
        v = check_speeds(v)
        sigma = self.hamiltonian.sigma.value
        result = sigma * self.hamiltonian.profile.conjugate(v / sigma) + self.hamiltonian.f.value
        return _scalar_or_array(result, v)

    def max_speed(self, point):
        return self.hamiltonian.sigma.at(point) * self.hamiltonian.profile.speed_limit

    def node_max_speeds(self, lattice):
        return self.hamiltonian.sigma.on_lattice(lattice) * self.hamiltonian.profile.speed_limit


class GridLagrangian(Lagrangian):
    """Conjugate of a profile without closed form, computed on a p-grid."""

    search_ceiling = 2.0**20

    def __init__(self, hamiltonian, p_max=None, n_p=None):
        super().__init__(hamiltonian)
        self.p_max = p_max
        self.n_p = n_p

    def value(self, point, v):
        from .legendre import grid_conjugate

        v = check_speeds(v)
        result = np.array(
            [
                grid_conjugate(self.hamiltonian, point, speed, self.p_max, self.n_p)
                for speed in np.atleast_1d(v)
            ]
        )
        return float(result[0]) if np.ndim(v) == 0 else result

    def _homogeneous_value(self, v):
        # Constant coefficients ignore the position.
        return self.value(None, v)

    def max_speed(self, point):
        if not np.isfinite(self.value(point, 0.0)):
            return 0.0
        low, high = 0.0, 1.0
        while np.isfinite(self.value(point, high)):
            low, high = high, 2.0 * high
            if high > self.search_ceiling:
                return np.inf
        for _ in range(60):
            middle = 0.5 * (low + high)
            if np.isfinite(self.value(point, middle)):
                low = middle
            else:
                high = middle
        return low


class TabulatedLagrangian(Lagrangian):
    """
    Exact conjugate of a piecewise-linear row: ``max_k (p_k v - H_k)`` up to
    the tail slope of the row and +inf beyond it.
    """

    def _conjugate_rows(self, rows, v):
        p_grid = self.hamiltonian.p_grid
        rows = np.atleast_2d(rows)
        objective = p_grid[None, None, :] * v[None, :, None] - rows[:, None, :]
        result = objective.max(axis=2)
        tails = self.hamiltonian.tail_slopes(rows)
        return np.where(v[None, :] <= tails[:, None], result, np.inf)

    def value(self, point, v):
        v = check_speeds(v)
        row = self.hamiltonian.row_at(point)
        self.hamiltonian.require_admissible_row(row)
        result = self._conjugate_rows(row, np.atleast_1d(v))[0]
        return float(result[0]) if np.ndim(v) == 0 else result

    def node_values(self, lattice, v):
        v = np.atleast_1d(check_speeds(v))
        rows = self.hamiltonian.rows_on(lattice)
        for row in rows:
            self.hamiltonian.require_admissible_row(row)
        return self._conjugate_rows(rows, v)

    def _homogeneous_value(self, v):
        v = check_speeds(v)
        row = self.hamiltonian.rows[0]
        result = self._conjugate_rows(row, np.atleast_1d(v))[0]
        return float(result[0]) if np.ndim(v) == 0 else result

    def max_speed(self, point):
        return float(self.hamiltonian.tail_slopes(self.hamiltonian.row_at(point))[0])

    def node_max_speeds(self, lattice):
        return self.hamiltonian.tail_slopes(self.hamiltonian.rows_on(lattice))


def hamiltonian_envelope(hamiltonian, lattice, p):
    """c_H(p) = sup over the lattice nodes of H(x, p)."""
    return float(np.max(hamiltonian.node_values(lattice, [p])))


def ell_envelope(lagrangian, lattice, v):
    """l(v) = inf over the lattice nodes of L(x, v)."""
    v = float(check_speeds(v))
    return float(np.min(lagrangian.node_values(lattice, [v])))


def max_speed_bound(lagrangian, lattice):
    """Global V_L: the smallest V_L(x) over the lattice nodes."""
    return float(np.min(lagrangian.node_max_speeds(lattice)))


def lagrangian_floor(hamiltonian, lattice):
    """The lower bound -c_H(0) on every value of L."""
    return -hamiltonian_envelope(hamiltonian, lattice, 0.0)


def superlinearity_profile(lagrangian, lattice, v_values):
    """Ratios l(v) / v along ``v_values`` (positive speeds), as ``(v, ratio)`` pairs."""
    profile = []
    for v in v_values:
        v = float(v)
        if v <= 0:
            raise InputError("Superlinearity is sampled at positive speeds", v=v)
        profile.append((v, ell_envelope(lagrangian, lattice, v) / v))
    logger.debug("Superlinearity profile: %s", profile)
    return profile


def default_p_max(v):
    return hj_settings.LEGENDRE_P_MAX_FACTOR * (1.0 + float(v))
