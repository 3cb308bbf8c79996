import numpy as np
import pytest

from groupnets.groups import make_group

ACCEPTANCE_LINES = []

SMALL_BATTERY = [(), (2,), (3,), (4,), (6,), (8,), (2, 2), (2, 3), (2, 4), (3, 3), (4, 2), (2, 2, 2), (12,)]


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture(params=SMALL_BATTERY, ids=lambda m: "x".join(f"Z{x}" for x in m) or "Z1")
def small_group(request):
    return make_group(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
