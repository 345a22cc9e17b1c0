import logging
import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from iqp.exceptions import ResourceLimitExceeded

logger = logging.getLogger(__name__)

DEFAULTS = {
    "GAP_MAX_N": 30,
    "DIRECT_MAX_N": 26,
    "ISING_FLOAT_MAX_N": 26,
    "ISING_EXACT_MAX_N": 24,
    "STATEVECTOR_MAX_N": 22,
    "DISTRIBUTION_MAX_N": 22,
    "EXACT_MOMENT_MAX_N_POLY3": 3,
    "EXACT_MOMENT_MAX_N_ISING": 2,
    "LEMMA9_MAX_N": 5,
    "FLOAT_CHUNK_BITS": 14,
    "GRAY_LANE_BITS": 16,
    "WORKERS": None,
}


def iqp_setting(name):
    """Read one key of ``settings.IQP``, falling back to the app defaults."""
    if name not in DEFAULTS:
        raise ImproperlyConfigured(f"Unknown IQP setting {name!r}")
    configured = getattr(settings, "IQP", None) or {}
    return configured.get(name, DEFAULTS[name])


def default_workers():
    workers = iqp_setting("WORKERS")
    return workers if workers else (os.cpu_count() or 1)


def check_limit(what, n, key):
    """Raise ResourceLimitExceeded when ``n`` exceeds the configured guard ``key``."""
    limit = iqp_setting(key)
    if n > limit:
        logger.warning("%s rejected: n=%d above %s=%d", what, n, key, limit)
        raise ResourceLimitExceeded(what, n, limit)
