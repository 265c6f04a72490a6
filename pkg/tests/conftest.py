import math

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# squeezing with tanh r = 1/2, the hand-checkable point
R_HALF = math.atanh(0.5)

# r in {0, 0.25, ..., 3}
R_GRID_13 = [0.25 * k for k in range(13)]


@pytest.fixture
def r_half():
    return R_HALF


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(RESULTS, key=lambda s: s.split()[1]):
        terminalreporter.write_line(line)
