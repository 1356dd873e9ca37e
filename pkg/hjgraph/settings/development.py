"""
Development settings for the hjgraph project.
"""

from .base import *

DEBUG = True

LOGGING["loggers"]["apps"]["level"] = config("HJ_LOG_LEVEL", default="DEBUG")

# Add development-specific apps if available
try:
    import django_extensions  # noqa: F401

    INSTALLED_APPS += ["django_extensions"]
except ImportError:
    pass
