"""
Hamiltonians H(x, p) for p >= 0.

Two forms are supported:

* composite ``H(x, p) = sigma(x) * h(p) - f(x)`` with a convex nondecreasing
  profile ``h``;
* tabulated rows of values on a p-grid, one row per lattice node,
  interpolated linearly in p (extrapolated with the last slope) and along
  edges between nodes.
"""

import logging

import numpy as np

from apps.core.exceptions import AssumptionViolationError, InputError

from .fields import NodeField

logger = logging.getLogger(__name__)


class Profile:
    """The one-dimensional profile h and, when known, its conjugate l."""

    name = "custom"
    closed_form = True
    speed_limit = np.inf

    def h(self, p):
        raise NotImplementedError

    def conjugate(self, v):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class QuadraticProfile(Profile):
    name = "quadratic"

    def h(self, p):
        p = np.asarray(p, dtype=float)
        return 0.5 * p * p

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        return 0.5 * v * v


class LinearProfile(Profile):
    """h(p) = p; the conjugate is 0 up to unit speed and +inf beyond."""

    name = "linear"
    speed_limit = 1.0

    def h(self, p):
        return np.asarray(p, dtype=float) * 1.0

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v <= 1.0, 0.0, np.inf)


class PowerProfile(Profile):
    """h(p) = p^a / a with a > 1, conjugate v^b / b where 1/a + 1/b = 1."""

    name = "power"

    def __init__(self, a):
        a = float(a)
        if not a > 1.0:
            raise InputError("Power profile exponent must exceed 1", a=a)
        self.a = a
        self.b = a / (a - 1.0)

    def __repr__(self):
        return f"PowerProfile(a={self.a!r})"

    def h(self, p):
        p = np.asarray(p, dtype=float)
        return p**self.a / self.a

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        return v**self.b / self.b


class CallableProfile(Profile):
    """Arbitrary profile; its conjugate is computed on a p-grid."""

    closed_form = False

    def __init__(self, func, name="custom"):
        self.func = func
        self.name = name

    def __repr__(self):
        return f"CallableProfile({self.name!r})"

    def h(self, p):
        return np.asarray(self.func(np.asarray(p, dtype=float)), dtype=float)


def get_profile(name, a=None):
    if name == "quadratic":
        return QuadraticProfile()
    if name == "linear":
        return LinearProfile()
    if name == "power":
        if a is None:
            raise InputError("Power profile needs an exponent")
        return PowerProfile(a)
    raise InputError("Unknown profile", name=name)


class CompositeHamiltonian:
    """H(x, p) = sigma(x) * h(p) - f(x)."""

    form = "composite"

    def __init__(self, profile, sigma=None, f=None):
        self.profile = profile
        self.sigma = sigma if sigma is not None else NodeField.uniform(1.0)
        self.f = f if f is not None else NodeField.uniform(0.0)
        if not self.sigma.inf() > 0:
            raise InputError("sigma must be bounded below by a positive constant")

    def __repr__(self):
        return f"CompositeHamiltonian({self.profile!r}, sigma={self.sigma!r}, f={self.f!r})"

    @property
    def closed_form(self):
        return self.profile.closed_form

    @property
    def is_homogeneous(self):
        return self.sigma.is_constant and self.f.is_constant

    def value(self, point, p):
        p = np.asarray(p, dtype=float)
        result = self.sigma.at(point) * self.profile.h(p) - self.f.at(point)
        return float(result) if result.ndim == 0 else result

    def node_values(self, lattice, p):
        """Matrix of H at every node of ``lattice`` (rows) and every entry of ``p`` (columns)."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        sigma = self.sigma.on_lattice(lattice)
        f = self.f.on_lattice(lattice)
        return sigma[:, None] * self.profile.h(p)[None, :] - f[:, None]

    def with_negated_potential(self):
        """The Hamiltonian of the maximization problem: f replaced by -f."""
        return CompositeHamiltonian(self.profile, self.sigma, -self.f)

    def lagrangian(self, p_max=None, n_p=None):
        from .lagrangian import CompositeLagrangian, GridLagrangian

        if self.profile.closed_form:
            return CompositeLagrangian(self)
        return GridLagrangian(self, p_max=p_max, n_p=n_p)


class TabulatedHamiltonian:
    """Per-node rows of H on an increasing p-grid starting at 0."""

    form = "tabulated"
    closed_form = True

    def __init__(self, lattice, p_grid, rows):
        p_grid = np.array(p_grid, dtype=float)
        rows = np.array(rows, dtype=float)
        if p_grid.ndim != 1 or p_grid.size < 2:
            raise InputError("The p-grid needs at least two points")
        if p_grid[0] != 0.0 or np.any(np.diff(p_grid) <= 0):
            raise InputError("The p-grid must start at 0 and increase strictly")
        if rows.shape != (lattice.size, p_grid.size):
            raise InputError(
                "Table shape does not match lattice and p-grid",
                shape=rows.shape,
                expected=(lattice.size, p_grid.size),
            )
        if not np.all(np.isfinite(rows)):
            raise InputError("Table values must be finite")
        p_grid.setflags(write=False)
        rows.setflags(write=False)
        self.lattice = lattice
        self.p_grid = p_grid
        self.rows = rows

    def __repr__(self):
        return f"TabulatedHamiltonian(nodes={self.rows.shape[0]}, p_points={self.p_grid.size})"

    @property
    def is_homogeneous(self):
        return bool(np.all(self.rows == self.rows[0]))

    @property
    def p_max(self):
        return float(self.p_grid[-1])

    def row_at(self, point):
        left, right, weight = self.lattice.cell_of(point)
        if weight == 0.0:
            return self.rows[left]
        return (1.0 - weight) * self.rows[left] + weight * self.rows[right]

    def rows_on(self, lattice):
        if lattice is self.lattice:
            return self.rows
        return np.stack([self.row_at(point) for point in lattice.points])

    def tail_slopes(self, rows):
        rows = np.atleast_2d(rows)
        return (rows[:, -1] - rows[:, -2]) / (self.p_grid[-1] - self.p_grid[-2])

    def _evaluate_rows(self, rows, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        rows = np.atleast_2d(rows)
        inside = np.stack([np.interp(np.minimum(p, self.p_max), self.p_grid, row) for row in rows])
        beyond = np.maximum(p - self.p_max, 0.0)
        return inside + self.tail_slopes(rows)[:, None] * beyond[None, :]

    def value(self, point, p):
        result = self._evaluate_rows(self.row_at(point), p)[0]
        return float(result[0]) if np.ndim(p) == 0 else result

    def node_values(self, lattice, p):
        return self._evaluate_rows(self.rows_on(lattice), p)

    def row_is_monotone(self, row, tol=1e-12):
        return bool(np.all(np.diff(row) >= -tol))

    def row_is_convex(self, row, tol=1e-12):
        slopes = np.diff(row) / np.diff(self.p_grid)
        return bool(np.all(np.diff(slopes) >= -tol))

    def require_admissible_row(self, row):
        """Raise when a row breaks discrete monotonicity or convexity in p."""
        if not self.row_is_monotone(row):
            logger.warning("Tabulated Hamiltonian row is not nondecreasing in p")
            raise AssumptionViolationError("Tabulated Hamiltonian row is not nondecreasing in p")
        if not self.row_is_convex(row):
            logger.warning("Tabulated Hamiltonian row is not convex in p")
            raise AssumptionViolationError("Tabulated Hamiltonian row is not convex in p")

    def lagrangian(self, p_max=None, n_p=None):
        from .lagrangian import TabulatedLagrangian

        return TabulatedLagrangian(self)
