"""
Base Django settings for the hjgraph project.

This file contains settings common to all environments.
"""

import os
from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config("DJANGO_SECRET_KEY", default="django-insecure-hjgraph-local-only")

DEBUG = config("DJANGO_DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "apps.core",
    "apps.metric_graph",
    "apps.hamiltonian",
    "apps.curves",
    "apps.hj_solver",
    "apps.verification",
    "apps.cli_io",
]

INSTALLED_APPS = THIRD_PARTY_APPS + LOCAL_APPS

# The solver keeps everything in memory; scenarios and results are files.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# Overrides of the numerical defaults in apps.core.conf.DEFAULTS
HJGRAPH = {}

# Logging configuration
LOG_LEVEL = config("HJ_LOG_LEVEL", default="INFO")
LOG_DIR = Path(config("HJ_LOG_DIR", default=str(BASE_DIR / "logs")))

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {process:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
        "file": {
            "level": "DEBUG",
            "class": "logging.handlers.RotatingFileHandler",
            "filename": LOG_DIR / "hjgraph.log",
            "maxBytes": 1024 * 1024 * 15,  # 15MB
            "backupCount": 10,
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "apps": {
            "handlers": ["console", "file"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}

# Create logs directory if it doesn't exist and we have permission
try:
    os.makedirs(LOG_DIR, exist_ok=True)
except PermissionError:
    # Fall back to console-only logging on read-only checkouts
    LOGGING["handlers"].pop("file")
    for logger_config in LOGGING["loggers"].values():
        logger_config["handlers"] = ["console"]
