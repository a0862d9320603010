import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ncqft import ModeLattice, SpacetimeDims, ThetaMatrix

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def dims():
    return SpacetimeDims(1, 2)


@pytest.fixture
def theta(dims):
    return ThetaMatrix.canonical(dims, 0.3)


@pytest.fixture
def lattice(dims):
    return ModeLattice.random(dims, 4, np.random.default_rng(0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
