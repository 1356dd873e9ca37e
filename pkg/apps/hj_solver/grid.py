"""
Tabulated value function U(x, t_k) on the space x time lattice.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import InputError

TIME_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ValueGrid:
    """
    ``values[i, k]`` is U at lattice node ``i`` and time ``k * dt``.

    ``choices[i, k]`` is the stencil candidate that produced ``values[i, k + 1]``;
    grids built outside the solver carry no choices and no stencil.
    """

    lattice: object
    dt: float
    horizon: float
    values: np.ndarray
    choices: np.ndarray = None
    stencil: object = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != self.lattice.size:
            raise InputError("Value grid must have one row per lattice node", shape=values.shape)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __repr__(self):
        return f"ValueGrid(nodes={self.values.shape[0]}, steps={self.n_steps}, dt={self.dt!r})"

    @property
    def n_steps(self):
        return self.values.shape[1] - 1

    @property
    def times(self):
        return self.dt * np.arange(self.n_steps + 1)

    @property
    def graph(self):
        return self.lattice.graph

    def time_index(self, t):
        """Index ``k`` with ``t == k * dt`` up to rounding, else ``None``."""
        s = float(t) / self.dt
        k = int(round(s))
        if abs(s - k) <= TIME_TOLERANCE and 0 <= k <= self.n_steps:
            return k
        return None

    def _time_weights(self, t):
        t = float(t)
        if t < -TIME_TOLERANCE * self.dt or t > self.horizon + TIME_TOLERANCE * self.dt:
            raise InputError("Time outside the grid horizon", t=t, horizon=self.horizon)
        k = self.time_index(t)
        if k is not None:
            return k, 0.0
        s = t / self.dt
        k = min(int(np.floor(s)), self.n_steps - 1)
        return k, s - k

    def layer(self, t):
        """Node values at time ``t``, linear in time between grid layers."""
        k, theta = self._time_weights(t)
        if theta == 0.0:
            return self.values[:, k].copy()
        return (1.0 - theta) * self.values[:, k] + theta * self.values[:, k + 1]

    def value_at(self, point, t):
        """U(point, t): linear along edges, then linear in time."""
        k, theta = self._time_weights(t)
        now = self.lattice.interpolate(self.values[:, k], point)
        if theta == 0.0:
            return now
        later = self.lattice.interpolate(self.values[:, k + 1], point)
        return (1.0 - theta) * now + theta * later

    def with_values(self, values):
        return dataclasses.replace(self, values=values)

    def negated(self):
        return self.with_values(-self.values)

    def same_shape(self, other):
        return (
            self.lattice.size == other.lattice.size
            and self.values.shape == other.values.shape
            and abs(self.dt - other.dt) <= TIME_TOLERANCE * self.dt
        )
