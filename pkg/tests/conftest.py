import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jsdm_relay.analysis.effective import LinkModel
from jsdm_relay.params import table1_scenario

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table1():
    return table1_scenario(64)


@pytest.fixture(scope="session")
def table1_lm(table1):
    return LinkModel(table1, (7, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
