import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("kzlab", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("kzlab")

T_VALUES = (0.7 + 0.3j, -1.3 + 0.2j, 2.5 - 0.4j)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, filled by test_acceptance
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
