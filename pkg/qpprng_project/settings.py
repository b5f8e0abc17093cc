"""
Django settings for qpprng_project project.

The project hosts a single app, ``rpss``, which implements the random
permutation sorting system and the QPP-RNG pipeline built on top of it.
Everything is driven through management commands; there is no web layer.

Every RPSS_* value below can be overridden from the environment or a .env
file (python-decouple).
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# =============================================================================
# CORE SETTINGS
# =============================================================================

# Unused by the toolkit itself, Django still expects one.
SECRET_KEY = config('SECRET_KEY', default='django-insecure-change-me-in-production')

DEBUG = config('DEBUG', default=True, cast=bool)


# =============================================================================
# APPLICATION DEFINITION
# =============================================================================

INSTALLED_APPS = [
    # Local apps
    "rpss",
]

# No persistence: every run is a pure function of its seeds and parameters.
DATABASES = {}

USE_TZ = True

TIME_ZONE = "UTC"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# =============================================================================
# RPSS ENGINE CONFIGURATION
# =============================================================================

# Default system parameters for the CLI (N, m, n)
RPSS_ARRAY_SIZE = config('RPSS_ARRAY_SIZE', default=5, cast=int)
RPSS_SUCCESS_COUNT = config('RPSS_SUCCESS_COUNT', default=5, cast=int)
RPSS_OUTPUT_BITS = config('RPSS_OUTPUT_BITS', default=8, cast=int)

# Suggested jitter preset, shown in help text
RPSS_DEFAULT_JITTER = config('RPSS_DEFAULT_JITTER', default='fat-like')

# A cycle that needs this many trials means the RNG is broken
RPSS_TRIAL_GUARD = config('RPSS_TRIAL_GUARD', default=10**9, cast=int)

# Per-trial deltas above this are "Too Big": kept in T, left out of tick histograms
RPSS_TOO_BIG_TICKS = config('RPSS_TOO_BIG_TICKS', default=500, cast=int)


# =============================================================================
# EXACT ORACLES & VALIDATION
# =============================================================================

# Negative binomial truncation tolerance for the brute-force oracles
RPSS_TAIL_EPS = config('RPSS_TAIL_EPS', default=1e-12, cast=float)

# Refuse to truncate beyond this many trials
RPSS_EXPECTED_TRIALS_CAP = config('RPSS_EXPECTED_TRIALS_CAP', default=10**7, cast=int)

# Monte Carlo cycles for `verify_law --monte-carlo` when no count is given
RPSS_MONTE_CARLO_CYCLES = config('RPSS_MONTE_CARLO_CYCLES', default=10**6, cast=int)

# analyze() warns when there are fewer samples than this per symbol
RPSS_MIN_SAMPLES_PER_SYMBOL = config('RPSS_MIN_SAMPLES_PER_SYMBOL', default=10, cast=int)

# Full-size (10^6 sample) acceptance runs in the test suite
RPSS_RUN_SLOW_TESTS = config('RPSS_RUN_SLOW_TESTS', default=False, cast=bool)


# =============================================================================
# LOGGING CONFIGURATION
# stdout carries machine output only, so every handler writes to stderr or a file
# =============================================================================

LOG_DIR = BASE_DIR / "logs"

RPSS_LOG_LEVEL = config('RPSS_LOG_LEVEL', default='INFO')
RPSS_LOG_TO_FILE = config('RPSS_LOG_TO_FILE', default=False, cast=bool)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {asctime} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "rpss": {
            "handlers": ["console"],
            "level": RPSS_LOG_LEVEL,
            "propagate": False,
        },
    },
}

if RPSS_LOG_TO_FILE:
    LOG_DIR.mkdir(exist_ok=True)
    LOGGING["handlers"]["file"] = {
        "level": "DEBUG",
        "class": "logging.handlers.RotatingFileHandler",
        "filename": LOG_DIR / "rpss.log",
        "maxBytes": 1024 * 1024 * 5,  # 5 MB
        "backupCount": 5,
        "formatter": "verbose",
    }
    LOGGING["loggers"]["rpss"]["handlers"].append("file")
