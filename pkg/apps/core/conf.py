"""
Access to the ``HJGRAPH`` settings dictionary with built-in fallbacks.

Usage:
    from apps.core.conf import hj_settings

    panels = hj_settings.QUADRATURE_PANELS
"""

from django.conf import settings

DEFAULTS = {
    "LEGENDRE_N_P": 1024,
    "LEGENDRE_P_MAX_FACTOR": 10.0,
    "QUADRATURE_PANELS": 64,
    "STENCIL_CELLS": 4,
    "SPEED_COUNT": 64,
    "GEOMETRIC_SPEED_RANGE": 128.0,
    "SPEED_REFERENCE_CELLS": 50,
    "SNAP_TOLERANCE": 1e-12,
    "CURVE_TOLERANCE": 1e-9,
    "MODULUS_ANCHORS": 64,
    "BRUTE_FORCE_CAPS": {
        "edges": 4,
        "depth": 4,
        "speeds": 6,
        "directions": 4,
    },
}


class HJSettings:
    """Lazy view over ``settings.HJGRAPH``; unknown names raise AttributeError."""

    def __getattr__(self, name):
        if name not in DEFAULTS:
            raise AttributeError(f"Invalid hjgraph setting: {name!r}")
        user_settings = getattr(settings, "HJGRAPH", {}) if settings.configured else {}
        return user_settings.get(name, DEFAULTS[name])


hj_settings = HJSettings()
