"""
Engine defaults resolved from Django settings.

The library must stay importable without a configured Django project, so
every lookup falls back to the built-in default below.
"""
from django.conf import settings

DEFAULTS = {
    'RPSS_ARRAY_SIZE': 5,
    'RPSS_SUCCESS_COUNT': 5,
    'RPSS_OUTPUT_BITS': 8,
    'RPSS_DEFAULT_JITTER': 'fat-like',
    'RPSS_TRIAL_GUARD': 10**9,
    'RPSS_TOO_BIG_TICKS': 500,
    'RPSS_TAIL_EPS': 1e-12,
    'RPSS_EXPECTED_TRIALS_CAP': 10**7,
    'RPSS_MONTE_CARLO_CYCLES': 10**6,
    'RPSS_MIN_SAMPLES_PER_SYMBOL': 10,
    'RPSS_RUN_SLOW_TESTS': False,
}


def get_setting(name):
    """Return the configured value for an RPSS_* setting."""
    default = DEFAULTS[name]
    if not settings.configured:
        return default
    return getattr(settings, name, default)
