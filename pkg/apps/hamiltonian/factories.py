"""
Factory classes for testing the hamiltonian app.
"""

import factory
import numpy as np

from .fields import NodeField
from .hamiltonians import (
    CompositeHamiltonian,
    LinearProfile,
    QuadraticProfile,
    TabulatedHamiltonian,
)


class QuadraticHamiltonianFactory(factory.Factory):
    """H(x, p) = p^2 / 2."""

    class Meta:
        model = CompositeHamiltonian

    profile = factory.LazyFunction(QuadraticProfile)
    sigma = factory.LazyFunction(lambda: NodeField.uniform(1.0))
    f = factory.LazyFunction(lambda: NodeField.uniform(0.0))


class EikonalHamiltonianFactory(QuadraticHamiltonianFactory):
    """H(x, p) = p."""

    profile = factory.LazyFunction(LinearProfile)


class TabulatedHamiltonianFactory(factory.Factory):
    """Rows of ``scale * p^2 / 2`` on ``p = 0, 0.5, ..., 5`` at every node of ``lattice``."""

    class Meta:
        model = TabulatedHamiltonian

    class Params:
        scale = 1.0

    lattice = None
    p_grid = factory.LazyFunction(lambda: np.linspace(0.0, 5.0, 11))
    rows = factory.LazyAttribute(
        lambda o: np.tile(o.scale * 0.5 * np.asarray(o.p_grid) ** 2, (o.lattice.size, 1))
    )
