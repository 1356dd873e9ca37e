"""
Testing settings for the hjgraph project.
"""

from .base import *

# Disable logging during tests
LOGGING_CONFIG = None

# Secret key for testing
SECRET_KEY = "test-secret-key-only-for-testing"

DEBUG = False

# Fewer modulus anchors keep the verification tests fast
HJGRAPH = {"MODULUS_ANCHORS": 32}
