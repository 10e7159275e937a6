import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cia_sim.signal_model import OfdmConfig

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile("default")

np.seterr(all="warn", under="ignore")

ACCEPTANCE_LINES = []


@pytest.fixture
def small_cfg():
    return OfdmConfig(n_subcarriers=16, cp_length=4, channel_order=4, noise_var=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
