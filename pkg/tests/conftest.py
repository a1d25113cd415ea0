import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def well_conditioned(rng, n, shift=None):
    """Gaussian matrix pushed away from singularity by a diagonal shift."""
    A = rng.standard_normal((n, n))
    return A + (shift if shift is not None else 2.0 * np.sqrt(n)) * np.eye(n)


def random_spd(rng, n, shift=1.0):
    Z = rng.standard_normal((n, n))
    return Z.T @ Z + shift * np.eye(n)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
