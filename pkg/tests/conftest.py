import os
from pathlib import Path

import numpy as np
import pytest

from gcp_neutrality import Graph

INSTANCE_DIR = Path(os.environ.get("GCP_INSTANCE_DIR", Path(__file__).resolve().parents[1] / "instances"))

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4():
    return Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def c6():
    return Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])


@pytest.fixture
def star5():
    return Graph.from_edges(6, [(0, i) for i in range(1, 6)])


@pytest.fixture
def edgeless():
    return Graph.from_edges(5, [])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
