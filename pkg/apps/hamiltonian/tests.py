"""
Tests for the hamiltonian app.
"""

import numpy as np
import pytest

from apps.core.exceptions import AssumptionViolationError, InputError
from apps.metric_graph.factories import MetricGraphFactory, PathGraphFactory, StarGraphFactory
from apps.metric_graph.graph import GraphPoint
from apps.metric_graph.lattice import build_lattice

from .assumptions import check_assumptions
from .factories import (
    EikonalHamiltonianFactory,
    QuadraticHamiltonianFactory,
    TabulatedHamiltonianFactory,
)
from .fields import NodeField
from .hamiltonians import CallableProfile, PowerProfile, TabulatedHamiltonian, get_profile
from .lagrangian import (
    ell_envelope,
    hamiltonian_envelope,
    lagrangian_floor,
    max_speed_bound,
    superlinearity_profile,
)
from .legendre import (
    conjugacy_gap,
    dual_roundtrip,
    legendre_transform,
    symmetric_roundtrip,
)

ORIGIN = GraphPoint(0, 0.0)
MIDPOINT = GraphPoint(0, 0.5)


@pytest.fixture
def lattice():
    return build_lattice(StarGraphFactory(), 0.25)


@pytest.fixture
def varying_quadratic(lattice):
    sigma = NodeField.tabulated(lattice, 1.0 + 0.5 * np.cos(np.arange(lattice.size)))
    f = NodeField.tabulated(lattice, 0.25 * np.sin(np.arange(lattice.size)))
    return QuadraticHamiltonianFactory(sigma=sigma, f=f)


@pytest.mark.unit
class TestLegendreTransform:
    def test_quadratic_closed_form(self):
        assert legendre_transform(QuadraticHamiltonianFactory(), ORIGIN, 2.0) == 2.0

    def test_linear_closed_form(self):
        hamiltonian = EikonalHamiltonianFactory()
        assert legendre_transform(hamiltonian, ORIGIN, 0.5) == 0.0
        assert legendre_transform(hamiltonian, ORIGIN, 1.5) == np.inf

    def test_constant_hamiltonian(self):
        hamiltonian = QuadraticHamiltonianFactory(
            profile=CallableProfile(lambda p: 0.0 * p, "zero"), f=NodeField.uniform(-3.0)
        )
        assert legendre_transform(hamiltonian, ORIGIN, 0.0) == -3.0
        assert legendre_transform(hamiltonian, ORIGIN, 0.7) == np.inf

    def test_negative_speed_rejected(self):
        with pytest.raises(InputError):
            legendre_transform(QuadraticHamiltonianFactory(), ORIGIN, -1.0)

    def test_golden_pairs_closed_form(self):
        quadratic = QuadraticHamiltonianFactory()
        speeds = np.linspace(0.0, 5.0, 101)
        errors = [abs(legendre_transform(quadratic, ORIGIN, v) - 0.5 * v * v) for v in speeds]
        assert max(errors) <= 1e-6

    def test_golden_pairs_grid(self):
        quadratic = QuadraticHamiltonianFactory()
        speeds = np.linspace(0.0, 5.0, 101)
        errors = [
            abs(legendre_transform(quadratic, ORIGIN, v, n_p=4096, method="grid") - 0.5 * v * v)
            for v in speeds
        ]
        assert max(errors) <= 1e-3

    @pytest.mark.parametrize("method", ["auto", "grid"])
    def test_linear_golden_pairs(self, method):
        eikonal = EikonalHamiltonianFactory()
        for v in np.linspace(0.0, 1.0, 21):
            assert legendre_transform(eikonal, ORIGIN, v, n_p=4096, method=method) == 0.0
        for v in np.linspace(1.05, 5.0, 20):
            assert legendre_transform(eikonal, ORIGIN, v, n_p=4096, method=method) == np.inf

    def test_power_profile_conjugate(self):
        hamiltonian = QuadraticHamiltonianFactory(profile=PowerProfile(3.0))
        closed = legendre_transform(hamiltonian, ORIGIN, 2.0)
        grid = legendre_transform(hamiltonian, ORIGIN, 2.0, n_p=8192, method="grid")
        assert closed == pytest.approx(2.0**1.5 / 1.5)
        assert grid == pytest.approx(closed, abs=1e-3)

    def test_composite_matches_scaled_formula(self, lattice, varying_quadratic):
        sigma = varying_quadratic.sigma.values
        f = varying_quadratic.f.values
        for i, point in enumerate(lattice.points):
            for v in (0.0, 0.3, 1.7, 4.0):
                expected = sigma[i] * (v / sigma[i]) ** 2 / 2 + f[i]
                assert legendre_transform(varying_quadratic, point, v) == pytest.approx(
                    expected, abs=1e-9
                )

    def test_tabulated_exact_conjugate(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        hamiltonian = TabulatedHamiltonianFactory(lattice=lattice)
        assert legendre_transform(hamiltonian, MIDPOINT, 2.0) == 2.0
        # Linear extrapolation beyond p = 5 has slope 4.75.
        assert hamiltonian.lagrangian().max_speed(MIDPOINT) == pytest.approx(4.75)
        assert legendre_transform(hamiltonian, MIDPOINT, 4.8) == np.inf

    def test_tabulated_non_monotone_row_rejected(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        rows = np.tile(np.array([0.0, 1.0, 0.5]), (lattice.size, 1))
        hamiltonian = TabulatedHamiltonian(lattice, [0.0, 1.0, 2.0], rows)
        with pytest.raises(AssumptionViolationError):
            legendre_transform(hamiltonian, ORIGIN, 0.5)
        with pytest.raises(AssumptionViolationError):
            legendre_transform(hamiltonian, ORIGIN, 0.5, method="grid")

    def test_tabulated_interpolates_between_nodes(self):
        lattice = build_lattice(MetricGraphFactory(), 0.5)
        hamiltonian = TabulatedHamiltonianFactory(lattice=lattice)
        scaled = TabulatedHamiltonianFactory(lattice=lattice, scale=3.0)
        rows = np.array(hamiltonian.rows)
        rows[lattice.locate(GraphPoint(0, 1.0))] = scaled.rows[0]
        mixed = TabulatedHamiltonian(lattice, hamiltonian.p_grid, rows)
        assert mixed.value(GraphPoint(0, 0.75), 2.0) == pytest.approx(0.5 * 2.0 + 0.5 * 6.0)

    def test_unknown_profile(self):
        with pytest.raises(InputError):
            get_profile("cubic")
        with pytest.raises(InputError):
            get_profile("power", a=1.0)


@pytest.mark.unit
class TestDuality:
    def test_quadratic_roundtrip(self):
        lagrangian = QuadraticHamiltonianFactory().lagrangian()
        assert dual_roundtrip(lagrangian, ORIGIN, 3.0, 10.0, 4096) == pytest.approx(4.5, abs=1e-4)

    def test_roundtrip_at_zero_is_minus_inf_of_lagrangian(self):
        lagrangian = QuadraticHamiltonianFactory(f=NodeField.uniform(0.25)).lagrangian()
        assert dual_roundtrip(lagrangian, ORIGIN, 0.0, 10.0, 64) == -0.25

    def test_eikonal_roundtrip(self):
        lagrangian = EikonalHamiltonianFactory().lagrangian()
        assert dual_roundtrip(lagrangian, ORIGIN, 2.0, 10.0, 64) == 2.0

    @pytest.mark.parametrize("factory_class", [QuadraticHamiltonianFactory, EikonalHamiltonianFactory])
    def test_roundtrip_recovers_hamiltonian(self, factory_class):
        hamiltonian = factory_class()
        lagrangian = hamiltonian.lagrangian()
        errors = [
            abs(dual_roundtrip(lagrangian, ORIGIN, p, 10.0, 4096) - hamiltonian.value(ORIGIN, p))
            for p in np.linspace(0.0, 5.0, 64)
        ]
        assert max(errors) <= 5e-3

    def test_roundtrip_on_varying_coefficients(self, lattice, varying_quadratic):
        lagrangian = varying_quadratic.lagrangian()
        for point in lattice.points[::3]:
            for p in (0.0, 1.0, 2.5):
                recovered = dual_roundtrip(lagrangian, point, p, 12.0, 4096)
                assert recovered == pytest.approx(varying_quadratic.value(point, p), abs=5e-3)

    def test_symmetric_roundtrip_is_even(self):
        hamiltonian = QuadraticHamiltonianFactory()
        lagrangian = hamiltonian.lagrangian()
        for p in (-3.0, -0.5, 0.5, 3.0):
            assert symmetric_roundtrip(lagrangian, ORIGIN, p, 10.0, 4096) == pytest.approx(
                hamiltonian.value(ORIGIN, abs(p)), abs=1e-4
            )

    def test_conjugacy_order_is_exact(self, lattice):
        # Dyadic samples keep the arithmetic exact.
        sigma = NodeField.tabulated(lattice, 1.0 + (np.arange(lattice.size) % 2))
        f = NodeField.tabulated(lattice, 0.25 * (np.arange(lattice.size) % 3))
        for hamiltonian in (
            QuadraticHamiltonianFactory(sigma=sigma, f=f),
            EikonalHamiltonianFactory(sigma=sigma, f=f),
        ):
            lagrangian = hamiltonian.lagrangian()
            grid = np.arange(0.0, 5.25, 0.25)
            for point in lattice.points:
                for p in grid:
                    for v in grid:
                        assert conjugacy_gap(hamiltonian, lagrangian, point, p, v) >= 0.0

    def test_lagrangian_convex_in_speed(self, varying_quadratic, lattice):
        v = np.linspace(0.0, 5.0, 101)
        for hamiltonian in (varying_quadratic, EikonalHamiltonianFactory()):
            values = hamiltonian.lagrangian().node_values(lattice, v)
            for row in values:
                finite = row[np.isfinite(row)]
                assert np.all(np.diff(finite, 2) >= -1e-9)
                assert np.all(np.diff(finite) >= -1e-12)


@pytest.mark.unit
class TestEnvelopes:
    def test_ell_quadratic(self, lattice):
        f = NodeField.tabulated(lattice, np.linspace(0.5, 1.5, lattice.size))
        lagrangian = QuadraticHamiltonianFactory(f=f).lagrangian()
        assert ell_envelope(lagrangian, lattice, 2.0) == pytest.approx(2.0 + 0.5)

    def test_ell_at_rest(self, lattice):
        assert ell_envelope(QuadraticHamiltonianFactory().lagrangian(), lattice, 0.0) == 0.0

    def test_ell_beyond_speed_limit(self, lattice):
        assert ell_envelope(EikonalHamiltonianFactory().lagrangian(), lattice, 2.0) == np.inf

    def test_ell_monotone_and_superlinear(self, lattice, varying_quadratic):
        lagrangian = varying_quadratic.lagrangian()
        values = [ell_envelope(lagrangian, lattice, v) for v in np.linspace(0.0, 8.0, 33)]
        assert np.all(np.diff(values) >= 0)
        ratios = [ratio for _, ratio in superlinearity_profile(lagrangian, lattice, 2.0 ** np.arange(1, 8))]
        assert np.all(np.diff(ratios) > 0)

    def test_floor_and_speed_bound(self, lattice):
        sigma = NodeField.tabulated(lattice, np.linspace(0.5, 2.0, lattice.size))
        f = NodeField.tabulated(lattice, np.linspace(-1.0, 1.0, lattice.size))
        hamiltonian = EikonalHamiltonianFactory(sigma=sigma, f=f)
        assert hamiltonian_envelope(hamiltonian, lattice, 0.0) == pytest.approx(1.0)
        assert lagrangian_floor(hamiltonian, lattice) == pytest.approx(-1.0)
        assert max_speed_bound(hamiltonian.lagrangian(), lattice) == pytest.approx(0.5)


@pytest.mark.unit
class TestCheckAssumptions:
    def test_quadratic_passes_everywhere(self, lattice, varying_quadratic):
        assert check_assumptions(QuadraticHamiltonianFactory(), lattice).passed
        assert check_assumptions(varying_quadratic, lattice).passed

    def test_eikonal_passes(self, lattice):
        assert check_assumptions(EikonalHamiltonianFactory(), lattice).passed

    def test_tabulated_quadratic_passes(self):
        lattice = build_lattice(PathGraphFactory(), 0.25)
        report = check_assumptions(TabulatedHamiltonianFactory(lattice=lattice), lattice)
        assert report.passed, report.as_text()

    def test_decreasing_hamiltonian_fails_monotonicity(self, lattice):
        hamiltonian = QuadraticHamiltonianFactory(profile=CallableProfile(lambda p: -p, "minus"))
        report = check_assumptions(hamiltonian, lattice)
        assert not report["A2_monotone"].passed
        assert not report.passed

    def test_square_root_fails_slope_proxy(self, lattice):
        hamiltonian = QuadraticHamiltonianFactory(profile=CallableProfile(np.sqrt, "sqrt"))
        report = check_assumptions(hamiltonian, lattice)
        assert not report["A4_slope"].passed
        assert report["A2_monotone"].passed

    def test_continuity_is_informational(self, lattice, varying_quadratic):
        item = check_assumptions(varying_quadratic, lattice)["A5_continuity"]
        assert item.informational
        assert item.passed
