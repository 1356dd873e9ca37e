"""
Spatial coefficients of composite Hamiltonians.
"""

import numpy as np

from apps.core.exceptions import InputError


class NodeField:
    """
    A bounded function on the graph: either a constant or per-node values of a
    lattice, interpolated linearly along edges.
    """

    def __init__(self, value=None, lattice=None, values=None):
        if (value is None) == (values is None):
            raise InputError("A field is either constant or tabulated on a lattice")
        if values is not None:
            values = np.array(values, dtype=float)
            if lattice is None or values.shape != (lattice.size,):
                raise InputError("Field values must match the lattice nodes")
            if not np.all(np.isfinite(values)):
                raise InputError("Field values must be finite")
            values.setflags(write=False)
        elif not np.isfinite(value):
            raise InputError("Field value must be finite", value=value)
        self.value = None if value is None else float(value)
        self.lattice = lattice
        self.values = values

    @classmethod
    def uniform(cls, value):
        return cls(value=value)

    @classmethod
    def tabulated(cls, lattice, values):
        return cls(lattice=lattice, values=values)

    def __repr__(self):
        if self.is_constant:
            return f"NodeField({self.value!r})"
        return f"NodeField(<{self.values.size} nodes>)"

    def __neg__(self):
        if self.is_constant:
            return NodeField.uniform(-self.value)
        return NodeField.tabulated(self.lattice, -self.values)

    @property
    def is_constant(self):
        return self.values is None

    def at(self, point):
        if self.is_constant:
            return self.value
        return self.lattice.interpolate(self.values, point)

    def at_many(self, edge_ids, offsets):
        if self.is_constant:
            return np.full(np.shape(offsets), self.value)
        return self.lattice.interpolate_many(self.values, edge_ids, offsets)

    def on_lattice(self, lattice):
        """Values at the nodes of ``lattice``, which need not be the field's own lattice."""
        if self.is_constant:
            return np.full(lattice.size, self.value)
        if lattice is self.lattice:
            return self.values
        return lattice.on_nodes(self.at)

    def sup(self):
        return self.value if self.is_constant else float(self.values.max())

    def inf(self):
        return self.value if self.is_constant else float(self.values.min())
