"""
Tests for the shared core helpers: exceptions, settings access and extended reals.
"""

import math

import numpy as np
import pytest
from django.conf import settings
from django.test import override_settings

from .conf import DEFAULTS, hj_settings
from .exceptions import (
    AssumptionViolationError,
    ConfigurationError,
    HJGraphError,
    InputError,
    InstanceTooLargeError,
    InternalError,
    ScenarioError,
)
from .extended import INF, finite_max, format_extended, parse_extended, saturating_add


@pytest.mark.unit
class TestExceptions:
    @pytest.mark.parametrize(
        "error_class, exit_code",
        [
            (InputError, 2),
            (ConfigurationError, 2),
            (AssumptionViolationError, 2),
            (InstanceTooLargeError, 2),
            (ScenarioError, 2),
            (InternalError, 3),
        ],
    )
    def test_exit_codes(self, error_class, exit_code):
        assert issubclass(error_class, HJGraphError)
        assert error_class.exit_code == exit_code

    def test_input_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            raise InputError("bad dx", dx=-1.0)

    def test_context_is_rendered(self):
        error = InputError("Lattice spacing must be positive", dx=-0.5)
        assert str(error) == "Lattice spacing must be positive (dx=-0.5)"
        assert error.context == {"dx": -0.5}

    def test_scenario_error_location(self):
        error = ScenarioError("Unknown section [mesh]", key="mesh", line=4, column=3)
        assert (error.key, error.line, error.column) == ("mesh", 4, 3)
        assert "line=4" in str(error)

    def test_scenario_error_without_location(self):
        error = ScenarioError("Scenario file not found: x.scn")
        assert str(error) == "Scenario file not found: x.scn"
        assert error.key is None


@pytest.mark.unit
class TestSettings:
    def test_defaults(self):
        assert hj_settings.STENCIL_CELLS == DEFAULTS["STENCIL_CELLS"]
        assert hj_settings.BRUTE_FORCE_CAPS["depth"] == 4

    def test_testing_settings_override(self):
        assert hj_settings.MODULUS_ANCHORS == 32

    def test_project_override(self):
        with override_settings(HJGRAPH={"SPEED_COUNT": 8}):
            assert hj_settings.SPEED_COUNT == 8
            assert hj_settings.QUADRATURE_PANELS == DEFAULTS["QUADRATURE_PANELS"]

    def test_unknown_setting(self):
        with pytest.raises(AttributeError):
            hj_settings.NOT_A_SETTING

    def test_project_settings_only_override(self):
        from hjgraph.settings import base

        assert base.HJGRAPH == {}
        assert settings.HJGRAPH == {"MODULUS_ANCHORS": 32}
        assert set(settings.HJGRAPH) <= set(DEFAULTS)

    def test_no_database_backed_apps(self):
        assert not [app for app in settings.INSTALLED_APPS if app.startswith("django.contrib")]


@pytest.mark.unit
class TestRequirements:
    def test_testing_stack(self):
        lines = (settings.BASE_DIR / "requirements" / "testing.txt").read_text().splitlines()
        names = {
            line.split(">=")[0].strip().lower()
            for line in lines
            if line.strip() and not line.startswith(("#", "-r"))
        }
        assert {"pytest", "pytest-django", "factory-boy", "hypothesis"} <= names
        assert "faker" not in names


@pytest.mark.unit
class TestExtendedReals:
    @pytest.mark.parametrize(
        "value, text",
        [(INF, "inf"), (-INF, "-inf"), (0.1, "0.1"), (2.0, "2.0"), (1e-300, "1e-300")],
    )
    def test_format(self, value, text):
        assert format_extended(value) == text
        assert parse_extended(text) == value

    def test_parse_accepts_spelled_out_infinity(self):
        assert parse_extended(" Infinity ") == INF
        assert parse_extended("-infinity") == -INF

    def test_format_numpy_scalar(self):
        assert format_extended(np.float64(0.5)) == "0.5"

    def test_saturating_add(self):
        assert saturating_add(1.0, INF, -INF) == INF
        assert saturating_add(1.0, 2.5) == 3.5
        assert saturating_add() == 0.0

    def test_finite_max(self):
        assert finite_max([1.0, INF, 3.0]) == 3.0
        assert finite_max([INF, math.nan]) == -INF
        assert finite_max([], default=0.0) == 0.0
