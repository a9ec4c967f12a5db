import os

import pytest
from hypothesis import HealthCheck, settings

from tracefn.cusp import extend_tau

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

TWIST_EXTENT = 70_000


@pytest.fixture(scope="session")
def tau_cache(tmp_path_factory):
    d = os.environ.get("TRACEFN_CACHE") or str(tmp_path_factory.mktemp("taucache"))
    return d


@pytest.fixture(scope="session")
def delta_small():
    return extend_tau(10_000)


@pytest.fixture(scope="session")
def delta_big(tau_cache):
    return extend_tau(TWIST_EXTENT, cache_dir=tau_cache)
