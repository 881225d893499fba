import numpy as np
import pytest

from hsr_alloc.config import parse_config
from hsr_alloc.study import Study


@pytest.fixture(scope="session")
def cfg():
    return parse_config()


@pytest.fixture(scope="session")
def study(cfg):
    return Study(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
