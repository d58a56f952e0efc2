import numpy as np
import pytest

from _helpers import ACCEPTANCE


@pytest.fixture
def rng():
    return np.random.default_rng(20231124)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
